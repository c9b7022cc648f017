//! Source terms of the gradual language and terms of the evidence calculus.

use crate::types::{Base, Evidence, Ty, TyVar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Const {
    Int(i64),
    Bool(bool),
    Unit,
}

impl Const {
    pub fn base(self) -> Base {
        match self {
            Const::Int(_) => Base::Int,
            Const::Bool(_) => Base::Bool,
            Const::Unit => Base::Unit,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Lt,
    Eq,
    Not,
    And,
    Or,
}

impl Op {
    pub fn arity(self) -> usize {
        match self {
            Op::Not => 1,
            _ => 2,
        }
    }

    /// Argument and result base types.
    pub fn signature(self) -> (Base, Base) {
        match self {
            Op::Add | Op::Sub | Op::Mul => (Base::Int, Base::Int),
            Op::Lt | Op::Eq => (Base::Int, Base::Bool),
            Op::Not | Op::And | Op::Or => (Base::Bool, Base::Bool),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Add => "+",
            Op::Sub => "-",
            Op::Mul => "*",
            Op::Lt => "<",
            Op::Eq => "==",
            Op::Not => "not",
            Op::And => "&&",
            Op::Or => "||",
        }
    }

    /// Binding strength for infix printing and parsing.
    pub fn prec(self) -> u8 {
        match self {
            Op::Or => 1,
            Op::And => 2,
            Op::Lt | Op::Eq => 3,
            Op::Add | Op::Sub => 4,
            Op::Mul => 5,
            Op::Not => 7,
        }
    }

    /// δ. Returns `None` when an argument has the wrong shape.
    pub fn apply(self, args: &[Const]) -> Option<Const> {
        use Const::*;
        Some(match (self, args) {
            (Op::Add, [Int(a), Int(b)]) => Int(a.wrapping_add(*b)),
            (Op::Sub, [Int(a), Int(b)]) => Int(a.wrapping_sub(*b)),
            (Op::Mul, [Int(a), Int(b)]) => Int(a.wrapping_mul(*b)),
            (Op::Lt, [Int(a), Int(b)]) => Bool(a < b),
            (Op::Eq, [Int(a), Int(b)]) => Bool(a == b),
            (Op::Not, [Bool(a)]) => Bool(!a),
            (Op::And, [Bool(a), Bool(b)]) => Bool(*a && *b),
            (Op::Or, [Bool(a), Bool(b)]) => Bool(*a || *b),
            _ => return None,
        })
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub kind: TermKind,
    pub span: Span,
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TermKind {
    Const(Const),
    Lam(String, Ty, Box<Term>),
    TyLam(TyVar, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Var(String),
    Asc(Box<Term>, Ty),
    Op(Op, Vec<Term>),
    App(Box<Term>, Box<Term>),
    TyApp(Box<Term>, Ty),
    Proj(u8, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    /// The annotation is optional in the surface syntax; without one the
    /// bound term's own type is used.
    Let(String, Option<Ty>, Box<Term>, Box<Term>),
    Pack(Ty, Box<Term>, Ty),
    Unpack(TyVar, String, Box<Term>, Box<Term>),
}

impl From<TermKind> for Term {
    fn from(kind: TermKind) -> Term {
        Term { kind, span: Span::default() }
    }
}

/// Span-free constructors, mostly for tests and generators.
pub mod build {
    use super::*;

    fn b(t: Term) -> Box<Term> {
        Box::new(t)
    }
    pub fn int(n: i64) -> Term {
        TermKind::Const(Const::Int(n)).into()
    }
    pub fn bool_(v: bool) -> Term {
        TermKind::Const(Const::Bool(v)).into()
    }
    pub fn unit() -> Term {
        TermKind::Const(Const::Unit).into()
    }
    pub fn var(x: &str) -> Term {
        TermKind::Var(x.into()).into()
    }
    pub fn lam(x: &str, g: Ty, body: Term) -> Term {
        TermKind::Lam(x.into(), g, b(body)).into()
    }
    pub fn tylam(x: &str, body: Term) -> Term {
        TermKind::TyLam(TyVar::new(x), b(body)).into()
    }
    pub fn pair(l: Term, r: Term) -> Term {
        TermKind::Pair(b(l), b(r)).into()
    }
    pub fn asc(t: Term, g: Ty) -> Term {
        TermKind::Asc(b(t), g).into()
    }
    pub fn op(o: Op, args: Vec<Term>) -> Term {
        TermKind::Op(o, args).into()
    }
    pub fn app(f: Term, a: Term) -> Term {
        TermKind::App(b(f), b(a)).into()
    }
    pub fn tyapp(f: Term, g: Ty) -> Term {
        TermKind::TyApp(b(f), g).into()
    }
    pub fn proj(i: u8, t: Term) -> Term {
        TermKind::Proj(i, b(t)).into()
    }
    pub fn if_(c: Term, t: Term, e: Term) -> Term {
        TermKind::If(b(c), b(t), b(e)).into()
    }
    pub fn let_(x: &str, g: Option<Ty>, t: Term, body: Term) -> Term {
        TermKind::Let(x.into(), g, b(t), b(body)).into()
    }
    pub fn pack(w: Ty, t: Term, as_: Ty) -> Term {
        TermKind::Pack(w, b(t), as_).into()
    }
    pub fn unpack(x: &str, y: &str, t: Term, body: Term) -> Term {
        TermKind::Unpack(TyVar::new(x), y.into(), b(t), b(body)).into()
    }
}

impl Term {
    /// Whether every annotation in the term is static.
    pub fn is_static(&self) -> bool {
        let mut ok = true;
        self.visit_types(&mut |g| ok &= g.is_static());
        ok
    }

    pub fn visit_types(&self, f: &mut dyn FnMut(&Ty)) {
        use TermKind::*;
        match &self.kind {
            Const(_) | Var(_) => {}
            Lam(_, g, t) => {
                f(g);
                t.visit_types(f);
            }
            TyLam(_, t) | Proj(_, t) => t.visit_types(f),
            Pair(a, c) | App(a, c) | Unpack(_, _, a, c) => {
                a.visit_types(f);
                c.visit_types(f);
            }
            Asc(t, g) | TyApp(t, g) => {
                t.visit_types(f);
                f(g);
            }
            Op(_, args) => args.iter().for_each(|a| a.visit_types(f)),
            If(a, c, d) => {
                a.visit_types(f);
                c.visit_types(f);
                d.visit_types(f);
            }
            Let(_, g, a, c) => {
                if let Some(g) = g {
                    f(g);
                }
                a.visit_types(f);
                c.visit_types(f);
            }
            Pack(w, t, g) => {
                f(w);
                t.visit_types(f);
                f(g);
            }
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        use TermKind::*;
        1 + match &self.kind {
            Const(_) | Var(_) => 0,
            Lam(_, _, t) | TyLam(_, t) | Proj(_, t) | Asc(t, _) | TyApp(t, _) | Pack(_, t, _) => {
                t.size()
            }
            Pair(a, c) | App(a, c) | Unpack(_, _, a, c) | Let(_, _, a, c) => a.size() + c.size(),
            Op(_, args) => args.iter().map(Term::size).sum(),
            If(a, c, d) => a.size() + c.size() + d.size(),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>) {
            use TermKind::*;
            let under = |x: &str, t: &Term, bound: &mut Vec<String>, out: &mut Vec<String>| {
                bound.push(x.to_string());
                go(t, bound, out);
                bound.pop();
            };
            match &t.kind {
                Const(_) => {}
                Var(x) => {
                    if !bound.contains(x) && !out.contains(x) {
                        out.push(x.clone());
                    }
                }
                Lam(x, _, b) => under(x, b, bound, out),
                TyLam(_, b) | Proj(_, b) | Asc(b, _) | TyApp(b, _) | Pack(_, b, _) => {
                    go(b, bound, out)
                }
                Pair(a, c) | App(a, c) => {
                    go(a, bound, out);
                    go(c, bound, out);
                }
                Let(x, _, a, c) | Unpack(_, x, a, c) => {
                    go(a, bound, out);
                    under(x, c, bound, out);
                }
                Op(_, args) => args.iter().for_each(|a| go(a, bound, out)),
                If(a, c, d) => {
                    go(a, bound, out);
                    go(c, bound, out);
                    go(d, bound, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

/// Terms of the evidence calculus.
#[derive(Clone, Debug, PartialEq)]
pub enum TermEps {
    Const(Const),
    Lam(String, Ty, Box<TermEps>),
    TyLam(TyVar, Box<TermEps>),
    Pair(Box<TermEps>, Box<TermEps>),
    Var(String),
    Asc(Evidence, Box<TermEps>, Ty),
    Op(Op, Vec<TermEps>),
    App(Box<TermEps>, Box<TermEps>),
    TyApp(Box<TermEps>, Ty),
    Proj(u8, Box<TermEps>),
    If(Box<TermEps>, Box<TermEps>, Box<TermEps>),
    /// Only valid directly under an ascription.
    Pack(Ty, Box<TermEps>, Ty),
    Unpack(TyVar, String, Box<TermEps>, Box<TermEps>),
}

impl TermEps {
    pub fn asc(ev: Evidence, t: TermEps, g: Ty) -> TermEps {
        TermEps::Asc(ev, Box::new(t), g)
    }

    /// Raw values: constants, abstractions, pairs of raw values, packages.
    pub fn is_raw(&self) -> bool {
        match self {
            TermEps::Const(_) | TermEps::Lam(..) | TermEps::TyLam(..) => true,
            TermEps::Pair(a, b) => a.is_raw() && b.is_raw(),
            TermEps::Pack(_, v, _) => v.is_value(),
            _ => false,
        }
    }

    pub fn is_value(&self) -> bool {
        matches!(self, TermEps::Asc(_, u, _) if u.is_raw())
    }

    /// `self[v/x]`; `v` is closed so no capture can occur.
    pub fn subst(&self, x: &str, v: &TermEps) -> TermEps {
        use TermEps::*;
        let s = |t: &TermEps| Box::new(t.subst(x, v));
        match self {
            Const(_) => self.clone(),
            Var(y) => {
                if y == x {
                    v.clone()
                } else {
                    self.clone()
                }
            }
            Lam(y, g, b) => {
                if y == x {
                    self.clone()
                } else {
                    Lam(y.clone(), g.clone(), s(b))
                }
            }
            TyLam(a, b) => TyLam(a.clone(), s(b)),
            Pair(a, b) => Pair(s(a), s(b)),
            Asc(e, t, g) => Asc(e.clone(), s(t), g.clone()),
            Op(o, args) => Op(*o, args.iter().map(|a| a.subst(x, v)).collect()),
            App(a, b) => App(s(a), s(b)),
            TyApp(a, g) => TyApp(s(a), g.clone()),
            Proj(i, a) => Proj(*i, s(a)),
            If(a, b, c) => If(s(a), s(b), s(c)),
            Pack(w, t, g) => Pack(w.clone(), s(t), g.clone()),
            Unpack(a, y, t1, t2) => {
                let t2 = if y == x { t2.clone() } else { s(t2) };
                Unpack(a.clone(), y.clone(), s(t1), t2)
            }
        }
    }

    /// Replace type variable `x` with `g` in types and `e` in evidences.
    /// Both replacements are closed.
    pub fn subst_ty(&self, x: &TyVar, g: &Ty, e: &Ty) -> TermEps {
        use TermEps::*;
        let s = |t: &TermEps| Box::new(t.subst_ty(x, g, e));
        let st = |t: &Ty| t.subst(x, g);
        match self {
            Const(_) | Var(_) => self.clone(),
            Lam(y, a, b) => Lam(y.clone(), st(a), s(b)),
            TyLam(a, b) => {
                if a == x {
                    self.clone()
                } else {
                    TyLam(a.clone(), s(b))
                }
            }
            Pair(a, b) => Pair(s(a), s(b)),
            Asc(ev, t, h) => Asc(
                Evidence::new(ev.left.subst(x, e), ev.right.subst(x, e)),
                s(t),
                st(h),
            ),
            Op(o, args) => Op(*o, args.iter().map(|a| a.subst_ty(x, g, e)).collect()),
            App(a, b) => App(s(a), s(b)),
            TyApp(a, h) => TyApp(s(a), st(h)),
            Proj(i, a) => Proj(*i, s(a)),
            If(a, b, c) => If(s(a), s(b), s(c)),
            Pack(w, t, h) => Pack(st(w), s(t), st(h)),
            Unpack(a, y, t1, t2) => {
                let t2 = if a == x { t2.clone() } else { s(t2) };
                Unpack(a.clone(), y.clone(), s(t1), t2)
            }
        }
    }

    pub fn size(&self) -> usize {
        use TermEps::*;
        1 + match self {
            Const(_) | Var(_) => 0,
            Lam(_, _, t) | TyLam(_, t) | Proj(_, t) | Asc(_, t, _) | TyApp(t, _) | Pack(_, t, _) => {
                t.size()
            }
            Pair(a, c) | App(a, c) | Unpack(_, _, a, c) => a.size() + c.size(),
            Op(_, args) => args.iter().map(TermEps::size).sum(),
            If(a, c, d) => a.size() + c.size() + d.size(),
        }
    }

    /// Pre-order list of ascription nodes (evidence, target).
    pub fn ascriptions(&self) -> Vec<(&Evidence, &Ty)> {
        let mut out = Vec::new();
        self.collect_asc(&mut out);
        out
    }

    fn collect_asc<'a>(&'a self, out: &mut Vec<(&'a Evidence, &'a Ty)>) {
        use TermEps::*;
        match self {
            Const(_) | Var(_) => {}
            Asc(e, t, g) => {
                out.push((e, g));
                t.collect_asc(out);
            }
            Lam(_, _, t) | TyLam(_, t) | Proj(_, t) | TyApp(t, _) | Pack(_, t, _) => {
                t.collect_asc(out)
            }
            Pair(a, c) | App(a, c) | Unpack(_, _, a, c) => {
                a.collect_asc(out);
                c.collect_asc(out);
            }
            Op(_, args) => args.iter().for_each(|a| a.collect_asc(out)),
            If(a, c, d) => {
                a.collect_asc(out);
                c.collect_asc(out);
                d.collect_asc(out);
            }
        }
    }
}
