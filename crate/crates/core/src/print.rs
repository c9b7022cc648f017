//! Pretty-printers for source and evidence terms. Output of the source
//! printer parses back to the same term.

use crate::syntax::{Const, Op, Term, TermEps, TermKind};
use std::fmt::{self, Write};

const BINDER: u8 = 0;
const ASC: u8 = 1;
const APP: u8 = 7;
const UNARY: u8 = 8;
const ATOM: u8 = 9;

fn op_strength(op: Op) -> u8 {
    op.prec() + 1
}

fn write_const(out: &mut String, c: &Const) {
    match c {
        Const::Int(n) if *n < 0 => write!(out, "({n})").unwrap(),
        Const::Int(n) => write!(out, "{n}").unwrap(),
        Const::Bool(b) => write!(out, "{b}").unwrap(),
        Const::Unit => out.push_str("unit"),
    }
}

fn open(out: &mut String, own: u8, ctx: u8) -> bool {
    let p = own < ctx;
    if p {
        out.push('(');
    }
    p
}

fn close(out: &mut String, p: bool) {
    if p {
        out.push(')');
    }
}

fn write_ops<T>(
    out: &mut String,
    op: Op,
    args: &[T],
    ctx: u8,
    rec: &dyn Fn(&mut String, &T, u8),
) {
    if op == Op::Not {
        let p = open(out, UNARY, ctx);
        out.push_str("not ");
        rec(out, &args[0], UNARY);
        close(out, p);
        return;
    }
    let s = op_strength(op);
    let p = open(out, s, ctx);
    let lhs_ctx = if op.prec() == 3 { s + 1 } else { s };
    rec(out, &args[0], lhs_ctx);
    write!(out, " {} ", op.symbol()).unwrap();
    rec(out, &args[1], s + 1);
    close(out, p);
}

fn term(out: &mut String, t: &Term, ctx: u8) {
    use TermKind::*;
    match &t.kind {
        Const(c) => write_const(out, c),
        Var(x) => out.push_str(x),
        Lam(x, g, b) => {
            let p = open(out, BINDER, ctx);
            write!(out, "\\{x}:{g}. ").unwrap();
            term(out, b, BINDER);
            close(out, p);
        }
        TyLam(x, b) => {
            let p = open(out, BINDER, ctx);
            write!(out, "/\\{x}. ").unwrap();
            term(out, b, BINDER);
            close(out, p);
        }
        Let(x, g, a, b) => {
            let p = open(out, BINDER, ctx);
            match g {
                Some(g) => write!(out, "let {x}:{g} = ").unwrap(),
                None => write!(out, "let {x} = ").unwrap(),
            }
            term(out, a, BINDER);
            out.push_str(" in ");
            term(out, b, BINDER);
            close(out, p);
        }
        If(c, a, b) => {
            let p = open(out, BINDER, ctx);
            out.push_str("if ");
            term(out, c, BINDER);
            out.push_str(" then ");
            term(out, a, BINDER);
            out.push_str(" else ");
            term(out, b, BINDER);
            close(out, p);
        }
        Unpack(x, y, a, b) => {
            let p = open(out, BINDER, ctx);
            write!(out, "unpack <{x}, {y}> = ").unwrap();
            term(out, a, BINDER);
            out.push_str(" in ");
            term(out, b, BINDER);
            close(out, p);
        }
        Asc(a, g) => {
            let p = open(out, ASC, ctx);
            term(out, a, ASC);
            write!(out, " :: {g}").unwrap();
            close(out, p);
        }
        Op(op, args) => write_ops(out, *op, args, ctx, &term),
        App(f, a) => {
            let p = open(out, APP, ctx);
            term(out, f, APP);
            out.push(' ');
            term(out, a, ATOM);
            close(out, p);
        }
        TyApp(f, g) => {
            let p = open(out, APP, ctx);
            term(out, f, APP);
            write!(out, " [{g}]").unwrap();
            close(out, p);
        }
        Proj(i, a) => {
            let p = open(out, UNARY, ctx);
            out.push_str(if *i == 1 { "fst " } else { "snd " });
            term(out, a, UNARY);
            close(out, p);
        }
        Pair(a, b) => {
            out.push('(');
            term(out, a, BINDER);
            out.push_str(", ");
            term(out, b, BINDER);
            out.push(')');
        }
        Pack(w, a, g) => {
            write!(out, "pack <{w}, ").unwrap();
            term(out, a, BINDER);
            write!(out, "> as {g}").unwrap();
        }
    }
}

fn eps(out: &mut String, t: &TermEps, ctx: u8) {
    use TermEps::*;
    match t {
        Const(c) => write_const(out, c),
        Var(x) => out.push_str(x),
        Lam(x, g, b) => {
            let p = open(out, BINDER, ctx);
            write!(out, "\\{x}:{g}. ").unwrap();
            eps(out, b, BINDER);
            close(out, p);
        }
        TyLam(x, b) => {
            let p = open(out, BINDER, ctx);
            write!(out, "/\\{x}. ").unwrap();
            eps(out, b, BINDER);
            close(out, p);
        }
        If(c, a, b) => {
            let p = open(out, BINDER, ctx);
            out.push_str("if ");
            eps(out, c, BINDER);
            out.push_str(" then ");
            eps(out, a, BINDER);
            out.push_str(" else ");
            eps(out, b, BINDER);
            close(out, p);
        }
        Unpack(x, y, a, b) => {
            let p = open(out, BINDER, ctx);
            write!(out, "unpack <{x}, {y}> = ").unwrap();
            eps(out, a, BINDER);
            out.push_str(" in ");
            eps(out, b, BINDER);
            close(out, p);
        }
        Asc(ev, a, g) => {
            let p = open(out, ASC, ctx);
            write!(out, "{ev} ").unwrap();
            eps(out, a, UNARY);
            write!(out, " :: {g}").unwrap();
            close(out, p);
        }
        Op(op, args) => write_ops(out, *op, args, ctx, &eps),
        App(f, a) => {
            let p = open(out, APP, ctx);
            eps(out, f, APP);
            out.push(' ');
            eps(out, a, ATOM);
            close(out, p);
        }
        TyApp(f, g) => {
            let p = open(out, APP, ctx);
            eps(out, f, APP);
            write!(out, " [{g}]").unwrap();
            close(out, p);
        }
        Proj(i, a) => {
            let p = open(out, UNARY, ctx);
            out.push_str(if *i == 1 { "fst " } else { "snd " });
            eps(out, a, UNARY);
            close(out, p);
        }
        Pair(a, b) => {
            out.push('(');
            eps(out, a, BINDER);
            out.push_str(", ");
            eps(out, b, BINDER);
            out.push(')');
        }
        Pack(w, a, g) => {
            write!(out, "pack <{w}, ").unwrap();
            eps(out, a, BINDER);
            write!(out, "> as {g}").unwrap();
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        term(&mut s, self, BINDER);
        f.write_str(&s)
    }
}

impl fmt::Display for TermEps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        eps(&mut s, self, BINDER);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use crate::parser::parse_gsf;

    #[test]
    fn round_trips() {
        for src in [
            "let f:forall X.X->X = /\\X. \\x:X. x in f [Int] 1 + 1",
            "(\\x:?. x + 1) false",
            "fst (1, 2) + snd (3, 4) * 2",
            "let p:forall X.(X->?)*(?->X) = /\\X. (\\x:X. x :: ?, \\x:?. x :: X) in p [?]",
            "unpack <X, x> = pack <Int, (1, \\y:Int. y)> as exists X.X*(X->X) in snd x (fst x)",
            "if 1 < 2 then not true else false && true || false",
            "f (\\x:Int. x) ((-3) :: ?)",
            "(1 == 2) :: Bool :: ?",
        ] {
            let t = parse_gsf(src).unwrap();
            let printed = t.to_string();
            let back = parse_gsf(&printed).unwrap();
            assert_eq!(t, back, "{src} printed as {printed}");
        }
    }
}
