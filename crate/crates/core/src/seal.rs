//! An untyped lambda calculus with dynamic sealing, its embedding into the
//! gradual language, and a differential harness comparing the two.
//!
//! The seal-free fragment doubles as the plain dynamically typed calculus.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::eval::{eval, EvalOptions, Outcome};
use crate::lexer::{ParseError, Tok};
use crate::parser::Parser;
use crate::syntax::{build, Const, Op, Span, Term};
use crate::types::Ty;

/// A runtime seal.
pub type SealId = u32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SealTerm {
    Const(Const),
    Lam(String, Box<SealTerm>),
    Pair(Box<SealTerm>, Box<SealTerm>),
    Var(String),
    App(Box<SealTerm>, Box<SealTerm>),
    Proj(u8, Box<SealTerm>),
    Op(Op, Vec<SealTerm>),
    If(Box<SealTerm>, Box<SealTerm>, Box<SealTerm>),
    /// `nu x. t`
    Nu(String, Box<SealTerm>),
    /// `seal(t1, t2)`: the value of `t1` sealed with the seal `t2`.
    Seal(Box<SealTerm>, Box<SealTerm>),
    /// `unseal x = (key, payload) in t`
    Unseal(String, Box<SealTerm>, Box<SealTerm>, Box<SealTerm>),
    /// Runtime only.
    Key(SealId),
}

pub mod sbuild {
    use super::*;

    fn b(t: SealTerm) -> Box<SealTerm> {
        Box::new(t)
    }
    pub fn int(n: i64) -> SealTerm {
        SealTerm::Const(Const::Int(n))
    }
    pub fn bool_(v: bool) -> SealTerm {
        SealTerm::Const(Const::Bool(v))
    }
    pub fn var(x: &str) -> SealTerm {
        SealTerm::Var(x.into())
    }
    pub fn lam(x: &str, body: SealTerm) -> SealTerm {
        SealTerm::Lam(x.into(), b(body))
    }
    pub fn pair(l: SealTerm, r: SealTerm) -> SealTerm {
        SealTerm::Pair(b(l), b(r))
    }
    pub fn app(f: SealTerm, a: SealTerm) -> SealTerm {
        SealTerm::App(b(f), b(a))
    }
    pub fn proj(i: u8, t: SealTerm) -> SealTerm {
        SealTerm::Proj(i, b(t))
    }
    pub fn op(o: Op, args: Vec<SealTerm>) -> SealTerm {
        SealTerm::Op(o, args)
    }
    pub fn if_(c: SealTerm, t: SealTerm, e: SealTerm) -> SealTerm {
        SealTerm::If(b(c), b(t), b(e))
    }
    pub fn nu(x: &str, body: SealTerm) -> SealTerm {
        SealTerm::Nu(x.into(), b(body))
    }
    pub fn seal(v: SealTerm, key: SealTerm) -> SealTerm {
        SealTerm::Seal(b(v), b(key))
    }
    pub fn unseal(x: &str, key: SealTerm, payload: SealTerm, body: SealTerm) -> SealTerm {
        SealTerm::Unseal(x.into(), b(key), b(payload), b(body))
    }
    /// `(\x. x x) (\x. x x)`
    pub fn omega() -> SealTerm {
        let w = lam("x", app(var("x"), var("x")));
        app(w.clone(), w)
    }
}

impl SealTerm {
    pub fn is_value(&self) -> bool {
        match self {
            SealTerm::Const(_) | SealTerm::Lam(..) | SealTerm::Key(_) => true,
            SealTerm::Pair(a, b) => a.is_value() && b.is_value(),
            SealTerm::Seal(v, k) => v.is_value() && matches!(**k, SealTerm::Key(_)),
            _ => false,
        }
    }

    /// Whether the term uses any sealing construct.
    pub fn has_sealing(&self) -> bool {
        use SealTerm::*;
        match self {
            Nu(..) | Seal(..) | Unseal(..) | Key(_) => true,
            Const(_) | Var(_) => false,
            Lam(_, t) | Proj(_, t) => t.has_sealing(),
            Pair(a, b) | App(a, b) => a.has_sealing() || b.has_sealing(),
            Op(_, args) => args.iter().any(|a| a.has_sealing()),
            If(a, b, c) => a.has_sealing() || b.has_sealing() || c.has_sealing(),
        }
    }

    pub fn size(&self) -> usize {
        use SealTerm::*;
        1 + match self {
            Const(_) | Var(_) | Key(_) => 0,
            Lam(_, t) | Proj(_, t) | Nu(_, t) => t.size(),
            Pair(a, b) | App(a, b) | Seal(a, b) => a.size() + b.size(),
            Op(_, args) => args.iter().map(|a| a.size()).sum(),
            If(a, b, c) | Unseal(_, a, b, c) => a.size() + b.size() + c.size(),
        }
    }

    fn vars(&self, out: &mut BTreeSet<String>) {
        use SealTerm::*;
        match self {
            Const(_) | Key(_) => {}
            Var(x) => {
                out.insert(x.clone());
            }
            Lam(x, t) | Nu(x, t) => {
                out.insert(x.clone());
                t.vars(out);
            }
            Proj(_, t) => t.vars(out),
            Pair(a, b) | App(a, b) | Seal(a, b) => {
                a.vars(out);
                b.vars(out);
            }
            Op(_, args) => args.iter().for_each(|a| a.vars(out)),
            If(a, b, c) => {
                a.vars(out);
                b.vars(out);
                c.vars(out);
            }
            Unseal(x, a, b, c) => {
                out.insert(x.clone());
                a.vars(out);
                b.vars(out);
                c.vars(out);
            }
        }
    }

    /// `self[v/x]` for a closed value `v`.
    fn subst(&self, x: &str, v: &SealTerm) -> SealTerm {
        use SealTerm::*;
        let s = |t: &SealTerm| Box::new(t.subst(x, v));
        match self {
            Var(y) if y == x => v.clone(),
            Const(_) | Var(_) | Key(_) => self.clone(),
            Lam(y, _) | Nu(y, _) if y == x => self.clone(),
            Lam(y, t) => Lam(y.clone(), s(t)),
            Nu(y, t) => Nu(y.clone(), s(t)),
            Proj(i, t) => Proj(*i, s(t)),
            Pair(a, b) => Pair(s(a), s(b)),
            App(a, b) => App(s(a), s(b)),
            Seal(a, b) => Seal(s(a), s(b)),
            Op(o, args) => Op(*o, args.iter().map(|a| a.subst(x, v)).collect()),
            If(a, b, c) => If(s(a), s(b), s(c)),
            Unseal(y, a, b, c) => {
                let c = if y == x { c.clone() } else { s(c) };
                Unseal(y.clone(), s(a), s(b), c)
            }
        }
    }
}

// Printing.

const ATOM: u8 = 9;
const APP: u8 = 7;

impl SealTerm {
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        use SealTerm::*;
        let strength = match self {
            Lam(..) | Nu(..) | If(..) | Unseal(..) => 0,
            Op(o, args) if args.len() == 2 => o.prec() + 1,
            App(..) => APP,
            Proj(..) | Op(..) => APP + 1,
            _ => ATOM,
        };
        let paren = strength < ctx;
        if paren {
            write!(f, "(")?;
        }
        match self {
            Const(crate::syntax::Const::Int(n)) if *n < 0 => write!(f, "(-{})", n.unsigned_abs())?,
            Const(crate::syntax::Const::Int(n)) => write!(f, "{n}")?,
            Const(crate::syntax::Const::Bool(b)) => write!(f, "{b}")?,
            Const(crate::syntax::Const::Unit) => write!(f, "unit")?,
            Var(x) => write!(f, "{x}")?,
            Key(s) => write!(f, "#{s}")?,
            Lam(x, t) => {
                write!(f, "\\{x}. ")?;
                t.fmt_at(f, 0)?;
            }
            Nu(x, t) => {
                write!(f, "nu {x}. ")?;
                t.fmt_at(f, 0)?;
            }
            Pair(a, b) => {
                write!(f, "(")?;
                a.fmt_at(f, 0)?;
                write!(f, ", ")?;
                b.fmt_at(f, 0)?;
                write!(f, ")")?;
            }
            Seal(a, b) => {
                write!(f, "seal(")?;
                a.fmt_at(f, 0)?;
                write!(f, ", ")?;
                b.fmt_at(f, 0)?;
                write!(f, ")")?;
            }
            App(a, b) => {
                a.fmt_at(f, APP)?;
                write!(f, " ")?;
                b.fmt_at(f, ATOM)?;
            }
            Proj(i, t) => {
                write!(f, "{} ", if *i == 1 { "fst" } else { "snd" })?;
                t.fmt_at(f, APP + 1)?;
            }
            Op(o, args) if args.len() == 2 => {
                let p = o.prec() + 1;
                args[0].fmt_at(f, p)?;
                write!(f, " {} ", o.symbol())?;
                args[1].fmt_at(f, p + 1)?;
            }
            Op(o, args) => {
                write!(f, "{} ", o.symbol())?;
                for a in args {
                    a.fmt_at(f, APP + 1)?;
                }
            }
            If(a, b, c) => {
                write!(f, "if ")?;
                a.fmt_at(f, 0)?;
                write!(f, " then ")?;
                b.fmt_at(f, 0)?;
                write!(f, " else ")?;
                c.fmt_at(f, 0)?;
            }
            Unseal(x, a, b, c) => {
                write!(f, "unseal {x} = (")?;
                a.fmt_at(f, 0)?;
                write!(f, ", ")?;
                b.fmt_at(f, 0)?;
                write!(f, ") in ")?;
                c.fmt_at(f, 0)?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for SealTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

// Parsing.

const KEYWORDS: &[&str] = &[
    "let", "in", "if", "then", "else", "fst", "snd", "not", "true", "false", "unit", "nu", "seal",
    "unseal",
];

impl Parser {
    fn s_term(&mut self) -> Result<SealTerm, ParseError> {
        use sbuild::*;
        match self.peek().clone() {
            Tok::Lambda => {
                self.bump();
                let x = self.ident(KEYWORDS)?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(lam(&x, self.s_term()?))
            }
            Tok::Ident(s, 0) if s == "nu" => {
                self.bump();
                let x = self.ident(KEYWORDS)?;
                self.expect(Tok::Dot, "`.`")?;
                Ok(nu(&x, self.s_term()?))
            }
            Tok::Ident(s, 0) if s == "let" => {
                self.bump();
                let x = self.ident(KEYWORDS)?;
                self.expect(Tok::Eq, "`=`")?;
                let t1 = self.s_term()?;
                self.expect_kw("in")?;
                let t2 = self.s_term()?;
                Ok(app(lam(&x, t2), t1))
            }
            Tok::Ident(s, 0) if s == "if" => {
                self.bump();
                let c = self.s_term()?;
                self.expect_kw("then")?;
                let a = self.s_term()?;
                self.expect_kw("else")?;
                let b = self.s_term()?;
                Ok(if_(c, a, b))
            }
            Tok::Ident(s, 0) if s == "unseal" => {
                self.bump();
                let x = self.ident(KEYWORDS)?;
                self.expect(Tok::Eq, "`=`")?;
                self.expect(Tok::LParen, "`(`")?;
                let k = self.s_term()?;
                self.expect(Tok::Comma, "`,`")?;
                let p = self.s_term()?;
                self.expect(Tok::RParen, "`)`")?;
                self.expect_kw("in")?;
                let body = self.s_term()?;
                Ok(unseal(&x, k, p, body))
            }
            _ => self.s_infix(1),
        }
    }

    fn s_infix(&mut self, min: u8) -> Result<SealTerm, ParseError> {
        let mut lhs = self.s_app()?;
        loop {
            let op = match self.peek() {
                Tok::OrOr => Op::Or,
                Tok::AndAnd => Op::And,
                Tok::Lt => Op::Lt,
                Tok::EqEq => Op::Eq,
                Tok::Plus => Op::Add,
                Tok::Minus => Op::Sub,
                Tok::Star => Op::Mul,
                _ => break,
            };
            let p = op.prec();
            if p < min {
                break;
            }
            self.bump();
            let rhs = self.s_infix(p + 1)?;
            lhs = SealTerm::Op(op, vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn s_starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Int(_) | Tok::LParen => true,
            Tok::Ident(s, 0) => !matches!(
                s.as_str(),
                "in" | "then" | "else" | "let" | "if" | "nu" | "unseal" | "fst" | "snd" | "not"
            ),
            _ => false,
        }
    }

    fn s_app(&mut self) -> Result<SealTerm, ParseError> {
        let mut f = self.s_unary()?;
        while self.s_starts_atom() {
            let a = self.s_atom()?;
            f = sbuild::app(f, a);
        }
        Ok(f)
    }

    fn s_unary(&mut self) -> Result<SealTerm, ParseError> {
        if self.is_kw("fst") || self.is_kw("snd") {
            let i = if self.is_kw("fst") { 1 } else { 2 };
            self.bump();
            Ok(sbuild::proj(i, self.s_unary()?))
        } else if self.is_kw("not") {
            self.bump();
            Ok(sbuild::op(Op::Not, vec![self.s_unary()?]))
        } else {
            self.s_atom()
        }
    }

    fn s_atom(&mut self) -> Result<SealTerm, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(sbuild::int(n))
            }
            Tok::LParen => {
                self.bump();
                if *self.peek() == Tok::Minus {
                    if let (Tok::Int(n), Tok::RParen) = (self.peek_at(1).clone(), self.peek_at(2)) {
                        self.bump();
                        self.bump();
                        self.bump();
                        return Ok(sbuild::int(-n));
                    }
                }
                let t = self.s_term()?;
                if *self.peek() == Tok::Comma {
                    self.bump();
                    let u = self.s_term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(sbuild::pair(t, u))
                } else {
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(t)
                }
            }
            Tok::Ident(s, 0) => match s.as_str() {
                "true" | "false" => {
                    self.bump();
                    Ok(sbuild::bool_(s == "true"))
                }
                "unit" => {
                    self.bump();
                    Ok(SealTerm::Const(Const::Unit))
                }
                "seal" => {
                    self.bump();
                    self.expect(Tok::LParen, "`(`")?;
                    let v = self.s_term()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let k = self.s_term()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(sbuild::seal(v, k))
                }
                _ => Ok(SealTerm::Var(self.ident(KEYWORDS)?)),
            },
            t => self.err(format!("expected term, found {t:?}")),
        }
    }
}

pub fn parse_seal(src: &str) -> Result<SealTerm, ParseError> {
    let mut p = Parser::new(src)?;
    let t = p.s_term()?;
    p.finish()?;
    Ok(t)
}

/// Parse a term of the seal-free fragment.
pub fn parse_dyn(src: &str) -> Result<SealTerm, ParseError> {
    let t = parse_seal(src)?;
    if t.has_sealing() {
        return Err(ParseError::new(Span::new(0, src.len()), "sealing constructs are not allowed here"));
    }
    Ok(t)
}

// Interpreter.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SealOutcome {
    /// The allocated seals and the final value.
    Value(Vec<SealId>, SealTerm),
    UnsealError,
    TypeError(String),
    SealTypeError(String),
    Timeout(usize),
}

impl fmt::Display for SealOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SealOutcome::Value(_, v) => write!(f, "{v}"),
            SealOutcome::UnsealError => write!(f, "unseal_error"),
            SealOutcome::TypeError(d) => write!(f, "type_error: {d}"),
            SealOutcome::SealTypeError(d) => write!(f, "seal_type_error: {d}"),
            SealOutcome::Timeout(n) => write!(f, "timeout after {n} steps"),
        }
    }
}

enum Fail {
    Unseal,
    Type(String),
    SealType(String),
}

fn misuse(v: &SealTerm, what: &str) -> Fail {
    // a seal used as an ordinary value is an invalid use of the key
    if matches!(v, SealTerm::Key(_)) {
        Fail::SealType(format!("a seal used as {what}"))
    } else {
        Fail::Type(format!("{v} used as {what}"))
    }
}

struct Machine {
    next: SealId,
}

impl Machine {
    fn step(&mut self, t: &SealTerm) -> Result<SealTerm, Fail> {
        use SealTerm::*;
        // congruence: the first non-value subterm in evaluation order
        macro_rules! frame {
            ($sub:expr, $rebuild:expr) => {
                if !$sub.is_value() {
                    let s = self.step($sub)?;
                    #[allow(clippy::redundant_closure_call)]
                    return Ok($rebuild(Box::new(s)));
                }
            };
        }
        match t {
            App(f, a) => {
                frame!(f, |s| App(s, a.clone()));
                frame!(a, |s| App(f.clone(), s));
                match &**f {
                    Lam(x, body) => Ok(body.subst(x, a)),
                    v => Err(misuse(v, "a function")),
                }
            }
            Pair(a, b) => {
                frame!(a, |s| Pair(s, b.clone()));
                frame!(b, |s| Pair(a.clone(), s));
                unreachable!("pair of values")
            }
            Proj(i, p) => {
                frame!(p, |s| Proj(*i, s));
                match &**p {
                    Pair(a, b) => Ok(if *i == 1 { (**a).clone() } else { (**b).clone() }),
                    v => Err(misuse(v, "a pair")),
                }
            }
            Op(o, args) => {
                if let Some(k) = args.iter().position(|a| !a.is_value()) {
                    let s = self.step(&args[k])?;
                    let mut args = args.clone();
                    args[k] = s;
                    return Ok(Op(*o, args));
                }
                let mut cs = Vec::new();
                for a in args {
                    match a {
                        Const(c) => cs.push(*c),
                        v => return Err(misuse(v, "an operand")),
                    }
                }
                o.apply(&cs)
                    .map(Const)
                    .ok_or_else(|| Fail::Type(format!("bad operands for {}", o.symbol())))
            }
            If(c, a, b) => {
                frame!(c, |s| If(s, a.clone(), b.clone()));
                match &**c {
                    Const(crate::syntax::Const::Bool(true)) => Ok((**a).clone()),
                    Const(crate::syntax::Const::Bool(false)) => Ok((**b).clone()),
                    v => Err(misuse(v, "a condition")),
                }
            }
            Nu(x, body) => {
                let s = self.next;
                self.next += 1;
                Ok(body.subst(x, &Key(s)))
            }
            Seal(v, k) => {
                frame!(v, |s| Seal(s, k.clone()));
                frame!(k, |s| Seal(v.clone(), s));
                Err(Fail::SealType(format!("sealing with {k}, which is not a seal")))
            }
            Unseal(x, k, p, body) => {
                frame!(k, |s| Unseal(x.clone(), s, p.clone(), body.clone()));
                frame!(p, |s| Unseal(x.clone(), k.clone(), s, body.clone()));
                let Key(want) = **k else {
                    return Err(Fail::SealType(format!("unsealing with {k}, which is not a seal")));
                };
                match &**p {
                    Seal(v, key) if **key == Key(want) => Ok(body.subst(x, v)),
                    _ => Err(Fail::Unseal),
                }
            }
            Var(x) => Err(Fail::Type(format!("unbound variable {x}"))),
            Const(_) | Lam(..) | Key(_) => unreachable!("values do not step"),
        }
    }
}

pub fn eval_seal(t: &SealTerm, max_steps: usize) -> SealOutcome {
    crate::eval::on_big_stack(|| eval_seal_here(t, max_steps))
}

fn eval_seal_here(t: &SealTerm, max_steps: usize) -> SealOutcome {
    let mut m = Machine { next: 0 };
    let mut t = t.clone();
    for _ in 0..max_steps {
        if t.is_value() {
            return SealOutcome::Value((0..m.next).collect(), t);
        }
        t = match m.step(&t) {
            Ok(t) => t,
            Err(Fail::Unseal) => return SealOutcome::UnsealError,
            Err(Fail::Type(d)) => return SealOutcome::TypeError(d),
            Err(Fail::SealType(d)) => return SealOutcome::SealTypeError(d),
        };
    }
    if t.is_value() {
        return SealOutcome::Value((0..m.next).collect(), t);
    }
    SealOutcome::Timeout(max_steps)
}

// Embeddings.

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("{0}")]
pub struct EmbedError(pub String);

struct Embed {
    used: BTreeSet<String>,
    counter: usize,
}

impl Embed {
    fn new(t: &SealTerm) -> Self {
        let mut used = BTreeSet::new();
        t.vars(&mut used);
        Embed { used, counter: 0 }
    }

    fn fresh(&mut self, hint: &str) -> String {
        loop {
            let x = format!("{hint}{}", self.counter);
            self.counter += 1;
            if !self.used.contains(&x) {
                return x;
            }
        }
    }

    fn go(&mut self, t: &SealTerm) -> Term {
        use build::*;
        let q = || Some(Ty::Unknown);
        match t {
            SealTerm::Const(c) => asc(crate::syntax::TermKind::Const(*c).into(), Ty::Unknown),
            SealTerm::Var(x) => var(x),
            SealTerm::Lam(x, body) => asc(lam(x, Ty::Unknown, self.go(body)), Ty::Unknown),
            SealTerm::Pair(a, b) => asc(pair(self.go(a), self.go(b)), Ty::Unknown),
            SealTerm::Proj(i, a) => proj(*i, self.go(a)),
            SealTerm::App(f, a) => {
                let (x, y) = (self.fresh("f"), self.fresh("a"));
                let (ef, ea) = (self.go(f), self.go(a));
                let_(&x, q(), ef, let_(&y, q(), ea, app(var(&x), var(&y))))
            }
            SealTerm::Op(o, args) => {
                let xs: Vec<String> = args.iter().map(|_| self.fresh("n")).collect();
                let es: Vec<Term> = args.iter().map(|a| self.go(a)).collect();
                let body = asc(op(*o, xs.iter().map(|x| var(x)).collect()), Ty::Unknown);
                xs.iter().zip(es).rev().fold(body, |acc, (x, e)| let_(x, q(), e, acc))
            }
            SealTerm::If(c, a, b) => {
                let x = self.fresh("c");
                let ec = self.go(c);
                let_(&x, q(), ec, if_(var(&x), self.go(a), self.go(b)))
            }
            SealTerm::Nu(x, body) => let_(x, q(), su(), self.go(body)),
            SealTerm::Seal(v, k) => {
                let (x, y) = (self.fresh("v"), self.fresh("k"));
                let (ev, ek) = (self.go(v), self.go(k));
                let_(&x, q(), ev, let_(&y, q(), ek, app(proj(1, var(&y)), var(&x))))
            }
            SealTerm::Unseal(z, k, p, body) => {
                let (x, y) = (self.fresh("k"), self.fresh("v"));
                let (ek, ep) = (self.go(k), self.go(p));
                let un = app(proj(2, var(&x)), var(&y));
                let_(&x, q(), ek, let_(&y, q(), ep, let_(z, q(), un, self.go(body))))
            }
            SealTerm::Key(s) => panic!("runtime seal #{s} in source text"),
        }
    }
}

/// `(/\X. ((\x:X. x :: ?), (\x:?. x :: X))) [?] :: ?`
pub fn su() -> Term {
    use build::*;
    let x = || Ty::Var(crate::types::TyVar::new("X"));
    let sealer = lam("x", x(), asc(var("x"), Ty::Unknown));
    let unsealer = lam("x", Ty::Unknown, asc(var("x"), x()));
    asc(tyapp(tylam("X", pair(sealer, unsealer)), Ty::Unknown), Ty::Unknown)
}

pub fn embed_dyn(t: &SealTerm) -> Result<Term, EmbedError> {
    if t.has_sealing() {
        return Err(EmbedError("sealing constructs cannot be embedded as dynamic terms".into()));
    }
    Ok(Embed::new(t).go(t))
}

pub fn embed_seal(t: &SealTerm) -> Term {
    if let Some(s) = first_key(t) {
        panic!("runtime seal #{s} in source text");
    }
    Embed::new(t).go(t)
}

fn first_key(t: &SealTerm) -> Option<SealId> {
    use SealTerm::*;
    match t {
        Key(s) => Some(*s),
        Const(_) | Var(_) => None,
        Lam(_, a) | Proj(_, a) | Nu(_, a) => first_key(a),
        Pair(a, b) | App(a, b) | Seal(a, b) => first_key(a).or_else(|| first_key(b)),
        Op(_, args) => args.iter().find_map(first_key),
        If(a, b, c) | Unseal(_, a, b, c) => first_key(a).or_else(|| first_key(b)).or_else(|| first_key(c)),
    }
}

// Differential checking.

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Agree(String),
    Disagree(String),
    /// The source run hits a seal type error, so the term is not valid.
    Skipped,
}

impl Verdict {
    pub fn is_agree(&self) -> bool {
        matches!(self, Verdict::Agree(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Agree(d) => write!(f, "agree ({d})"),
            Verdict::Disagree(d) => write!(f, "disagree: {d}"),
            Verdict::Skipped => write!(f, "skipped (seal type error)"),
        }
    }
}

/// Step budget of the embedded run relative to the source run when the
/// source run terminates: an embedded step sequence is a constant factor
/// longer. A diverging source run gets the same budget on both sides, which
/// suffices since every source step takes at least one embedded step.
pub const EMBED_STEP_FACTOR: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    Dyn,
    Seal,
}

pub fn differential_check(t: &SealTerm, max_steps: usize) -> Verdict {
    differential_check_with(t, max_steps, Embedding::Seal)
}

pub fn differential_check_with(t: &SealTerm, max_steps: usize, how: Embedding) -> Verdict {
    let src = eval_seal(t, max_steps);
    if let SealOutcome::SealTypeError(_) = src {
        return Verdict::Skipped;
    }
    let embedded = match how {
        Embedding::Seal => embed_seal(t),
        Embedding::Dyn => match embed_dyn(t) {
            Ok(e) => e,
            Err(e) => return Verdict::Disagree(e.0),
        },
    };
    let budget = match src {
        SealOutcome::Timeout(_) => max_steps,
        _ => max_steps.saturating_mul(EMBED_STEP_FACTOR),
    };
    let opts = EvalOptions::with_steps(budget);
    let out = match eval(&embedded, &opts) {
        Ok(o) => o,
        Err(e) => return Verdict::Disagree(format!("embedding rejected: {e}")),
    };
    compare(&src, &out)
}

/// Outcome correspondence: values with values (equal constants at base
/// type), source errors with runtime errors, timeouts with timeouts.
pub fn compare(src: &SealOutcome, out: &Outcome) -> Verdict {
    match (src, out) {
        (SealOutcome::Value(_, v), Outcome::Value(..)) => match v {
            SealTerm::Const(c) if out.constant() != Some(*c) => {
                Verdict::Disagree(format!("values differ: {v} vs {out}"))
            }
            _ => Verdict::Agree("value".into()),
        },
        (SealOutcome::UnsealError | SealOutcome::TypeError(_), Outcome::RuntimeError { .. }) => {
            Verdict::Agree("error".into())
        }
        (SealOutcome::Timeout(_), Outcome::Timeout(_)) => Verdict::Agree("timeout".into()),
        _ => Verdict::Disagree(format!("{src} vs {out}")),
    }
}
