//! Well-formedness, consistency and type checking for source terms, for the
//! static fragment, and for evidence terms.

use crate::syntax::{Span, Term, TermEps, TermKind};
use crate::types::{
    common_binder, inst, join, precision, proj, unlift, Base, Store, Ty, TyVar,
};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, Default)]
pub struct TypeEnv {
    pub store: Store,
    pub tyvars: Vec<TyVar>,
    pub vars: Vec<(String, Ty)>,
}

impl TypeEnv {
    pub fn new() -> Self {
        TypeEnv::default()
    }

    pub fn with_store(store: Store) -> Self {
        TypeEnv { store, ..TypeEnv::default() }
    }

    pub fn lookup(&self, x: &str) -> Option<&Ty> {
        self.vars.iter().rev().find(|(y, _)| y == x).map(|(_, g)| g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TypeErrorKind {
    IllFormedType,
    Inconsistent,
    NotAFunction,
    NotAForall,
    NotAPair,
    NotAnExists,
    UnboundVariable,
    OpArity,
    /// Rejected by the static checker because of a `?`.
    NotStatic,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TypeErrorKind::IllFormedType => "ill-formed type",
            TypeErrorKind::Inconsistent => "inconsistent types",
            TypeErrorKind::NotAFunction => "not a function",
            TypeErrorKind::NotAForall => "not a universal",
            TypeErrorKind::NotAPair => "not a pair",
            TypeErrorKind::NotAnExists => "not an existential",
            TypeErrorKind::UnboundVariable => "unbound variable",
            TypeErrorKind::OpArity => "operator arity",
            TypeErrorKind::NotStatic => "not static",
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
#[error("type error ({kind}) at {}..{}: {message}", span.start, span.end)]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub span: Span,
    pub message: String,
}

fn terr(kind: TypeErrorKind, span: Span, message: impl Into<String>) -> TypeError {
    TypeError { kind, span, message: message.into() }
}

pub fn wf_type(env: &TypeEnv, g: &Ty) -> bool {
    fn go(env: &TypeEnv, bound: &mut Vec<TyVar>, g: &Ty) -> bool {
        match g {
            Ty::Base(_) | Ty::Unknown => true,
            Ty::Var(x) => bound.contains(x) || env.tyvars.contains(x),
            Ty::Name(a) => env.store.contains(*a),
            Ty::Sealed(a, e) => env.store.contains(*a) && go(env, bound, e),
            Ty::Arrow(a, b) | Ty::Pair(a, b) => go(env, bound, a) && go(env, bound, b),
            Ty::Forall(x, b) | Ty::Exists(x, b) => {
                bound.push(x.clone());
                let r = go(env, bound, b);
                bound.pop();
                r
            }
        }
    }
    go(env, &mut Vec::new(), g)
}

/// Consistency `Δ; Ξ ⊢ g1 ∼ g2`.
pub fn consistent(env: &TypeEnv, g1: &Ty, g2: &Ty) -> bool {
    wf_type(env, g1) && wf_type(env, g2) && cons_go(&env.store, &mut Vec::new(), g1, g2)
}

// Binders are renamed to a common variable, so plain equality suffices for variables.
fn cons_go(store: &Store, seen: &mut Vec<(u32, Ty)>, g1: &Ty, g2: &Ty) -> bool {
    match (g1, g2) {
        (Ty::Unknown, _) | (_, Ty::Unknown) => true,
        (Ty::Base(a), Ty::Base(b)) => a == b,
        (Ty::Var(a), Ty::Var(b)) => a == b,
        (Ty::Name(a), Ty::Name(b)) if a == b => true,
        (Ty::Name(a), other) | (other, Ty::Name(a)) => {
            // unfold through the store; guard against revisiting the same pair
            if seen.iter().any(|(n, t)| *n == a.0 && t == other) {
                return false;
            }
            let Some(bound) = store.get(*a) else { return false };
            seen.push((a.0, other.clone()));
            let r = cons_go(store, seen, bound, other);
            seen.pop();
            r
        }
        (Ty::Arrow(a1, b1), Ty::Arrow(a2, b2)) | (Ty::Pair(a1, b1), Ty::Pair(a2, b2)) => {
            cons_go(store, seen, a1, a2) && cons_go(store, seen, b1, b2)
        }
        (Ty::Forall(x, b1), Ty::Forall(y, b2)) | (Ty::Exists(x, b1), Ty::Exists(y, b2)) => {
            let (_, bs) = common_binder(&[(x, b1), (y, b2)]);
            cons_go(store, seen, &bs[0], &bs[1])
        }
        _ => false,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Gradual,
    Static,
}

struct Checker {
    mode: Mode,
}

impl Checker {
    fn related(&self, env: &TypeEnv, g1: &Ty, g2: &Ty) -> bool {
        match self.mode {
            Mode::Gradual => consistent(env, g1, g2),
            Mode::Static => g1 == g2,
        }
    }

    fn check_ann(&self, env: &TypeEnv, g: &Ty, span: Span) -> Result<(), TypeError> {
        if self.mode == Mode::Static && !g.is_static() {
            return Err(terr(TypeErrorKind::NotStatic, span, format!("annotation {g} mentions ?")));
        }
        if !wf_type(env, g) {
            return Err(terr(TypeErrorKind::IllFormedType, span, format!("{g} is not well formed")));
        }
        Ok(())
    }

    fn require(&self, env: &TypeEnv, have: &Ty, want: &Ty, span: Span) -> Result<(), TypeError> {
        if self.related(env, have, want) {
            Ok(())
        } else {
            let rel = if self.mode == Mode::Gradual { "consistent with" } else { "equal to" };
            Err(terr(TypeErrorKind::Inconsistent, span, format!("{have} is not {rel} {want}")))
        }
    }

    fn check(&self, env: &mut TypeEnv, t: &Term) -> Result<Ty, TypeError> {
        use TermKind::*;
        let sp = t.span;
        match &t.kind {
            Const(c) => Ok(Ty::Base(c.base())),
            Var(x) => env
                .lookup(x)
                .cloned()
                .ok_or_else(|| terr(TypeErrorKind::UnboundVariable, sp, format!("unbound variable {x}"))),
            Lam(x, g, body) => {
                self.check_ann(env, g, sp)?;
                env.vars.push((x.clone(), g.clone()));
                let r = self.check(env, body);
                env.vars.pop();
                Ok(Ty::Arrow(Box::new(g.clone()), Box::new(r?)))
            }
            TyLam(x, body) => {
                env.tyvars.push(x.clone());
                let r = self.check(env, body);
                env.tyvars.pop();
                Ok(Ty::Forall(x.clone(), Box::new(r?)))
            }
            Pair(a, b) => {
                let ga = self.check(env, a)?;
                let gb = self.check(env, b)?;
                Ok(Ty::Pair(Box::new(ga), Box::new(gb)))
            }
            Asc(a, g) => {
                self.check_ann(env, g, sp)?;
                let ga = self.check(env, a)?;
                self.require(env, &ga, g, sp)?;
                Ok(g.clone())
            }
            Op(op, args) => {
                if args.len() != op.arity() {
                    return Err(terr(
                        TypeErrorKind::OpArity,
                        sp,
                        format!("{} expects {} arguments", op.symbol(), op.arity()),
                    ));
                }
                let (arg, res) = op.signature();
                for a in args {
                    let ga = self.check(env, a)?;
                    self.require(env, &ga, &Ty::Base(arg), a.span)?;
                }
                Ok(Ty::Base(res))
            }
            App(f, a) => {
                let gf = self.check(env, f)?;
                let ga = self.check(env, a)?;
                let (d, c) = match &gf {
                    Ty::Arrow(d, c) => ((**d).clone(), (**c).clone()),
                    Ty::Unknown if self.mode == Mode::Gradual => (Ty::Unknown, Ty::Unknown),
                    _ => {
                        return Err(terr(TypeErrorKind::NotAFunction, f.span, format!("{gf} is not a function type")))
                    }
                };
                self.require(env, &ga, &d, a.span)?;
                Ok(c)
            }
            TyApp(f, g) => {
                self.check_ann(env, g, sp)?;
                let gf = self.check(env, f)?;
                match (&gf, self.mode) {
                    (Ty::Forall(..), _) | (Ty::Unknown, Mode::Gradual) => Ok(inst(&gf, g).unwrap()),
                    _ => Err(terr(TypeErrorKind::NotAForall, f.span, format!("{gf} is not a universal type"))),
                }
            }
            Proj(i, a) => {
                let ga = self.check(env, a)?;
                match (&ga, self.mode) {
                    (Ty::Pair(..), _) | (Ty::Unknown, Mode::Gradual) => Ok(proj(*i, &ga).unwrap()),
                    _ => Err(terr(TypeErrorKind::NotAPair, a.span, format!("{ga} is not a pair type"))),
                }
            }
            If(c, a, b) => {
                let gc = self.check(env, c)?;
                self.require(env, &gc, &Ty::Base(Base::Bool), c.span)?;
                let ga = self.check(env, a)?;
                let gb = self.check(env, b)?;
                if self.mode == Mode::Static {
                    self.require(env, &gb, &ga, sp)?;
                    return Ok(ga);
                }
                join(&ga, &gb).ok_or_else(|| {
                    terr(TypeErrorKind::Inconsistent, sp, format!("branches {ga} and {gb} are inconsistent"))
                })
            }
            Let(x, ann, a, body) => {
                let ga = self.check(env, a)?;
                let g = match ann {
                    Some(g) => {
                        self.check_ann(env, g, sp)?;
                        self.require(env, &ga, g, a.span)?;
                        g.clone()
                    }
                    None => ga,
                };
                env.vars.push((x.clone(), g));
                let r = self.check(env, body);
                env.vars.pop();
                r
            }
            Pack(w, a, g) => {
                self.check_ann(env, w, sp)?;
                self.check_ann(env, g, sp)?;
                let Ty::Exists(x, body) = g else {
                    return Err(terr(TypeErrorKind::NotAnExists, sp, format!("{g} is not an existential type")));
                };
                let ga = self.check(env, a)?;
                self.require(env, &ga, &body.subst(x, w), a.span)?;
                Ok(g.clone())
            }
            Unpack(x, y, a, body) => {
                let ga = self.check(env, a)?;
                let schema = match (&ga, self.mode) {
                    (Ty::Exists(..), _) => ga.body_as(x).unwrap(),
                    (Ty::Unknown, Mode::Gradual) => Ty::Unknown,
                    _ => {
                        return Err(terr(TypeErrorKind::NotAnExists, a.span, format!("{ga} is not an existential type")))
                    }
                };
                env.tyvars.push(x.clone());
                env.vars.push((y.clone(), schema));
                let r = self.check(env, body);
                env.vars.pop();
                env.tyvars.pop();
                let g = r?;
                if !wf_type(env, &g) {
                    return Err(terr(
                        TypeErrorKind::IllFormedType,
                        sp,
                        format!("unpack result {g} mentions the hidden type {x}"),
                    ));
                }
                Ok(g)
            }
        }
    }
}

pub fn typecheck_gsf(env: &TypeEnv, t: &Term) -> Result<Ty, TypeError> {
    Checker { mode: Mode::Gradual }.check(&mut env.clone(), t)
}

/// The fully static language: type equality replaces consistency and `?` is rejected.
pub fn typecheck_sf(env: &TypeEnv, t: &Term) -> Result<Ty, TypeError> {
    Checker { mode: Mode::Static }.check(&mut env.clone(), t)
}

pub fn typecheck(t: &Term) -> Result<Ty, TypeError> {
    typecheck_gsf(&TypeEnv::new(), t)
}

fn eerr(kind: TypeErrorKind, message: String) -> TypeError {
    terr(kind, Span::default(), message)
}

/// Typing for evidence terms: eliminations require exact type matches and
/// each ascription's evidence must support its judgment.
pub fn typecheck_eps(env: &TypeEnv, t: &TermEps) -> Result<Ty, TypeError> {
    eps_check(&mut env.clone(), t)
}

fn eps_check(env: &mut TypeEnv, t: &TermEps) -> Result<Ty, TypeError> {
    use TermEps::*;
    use TypeErrorKind as K;
    let wf = |env: &TypeEnv, g: &Ty| {
        if wf_type(env, g) {
            Ok(())
        } else {
            Err(eerr(K::IllFormedType, format!("{g} is not well formed")))
        }
    };
    match t {
        Const(c) => Ok(Ty::Base(c.base())),
        Var(x) => env
            .lookup(x)
            .cloned()
            .ok_or_else(|| eerr(K::UnboundVariable, format!("unbound variable {x}"))),
        Lam(x, g, body) => {
            wf(env, g)?;
            env.vars.push((x.clone(), g.clone()));
            let r = eps_check(env, body);
            env.vars.pop();
            Ok(Ty::Arrow(Box::new(g.clone()), Box::new(r?)))
        }
        TyLam(x, body) => {
            env.tyvars.push(x.clone());
            let r = eps_check(env, body);
            env.tyvars.pop();
            Ok(Ty::Forall(x.clone(), Box::new(r?)))
        }
        Pair(a, b) => Ok(Ty::Pair(Box::new(eps_check(env, a)?), Box::new(eps_check(env, b)?))),
        Asc(ev, a, g) => {
            wf(env, g)?;
            wf(env, &ev.left)?;
            wf(env, &ev.right)?;
            let ga = eps_check(env, a)?;
            if !precision(&unlift(&ev.left), &ga) || !precision(&unlift(&ev.right), g) {
                return Err(eerr(
                    K::Inconsistent,
                    format!("evidence {ev} does not support {ga} ~ {g}"),
                ));
            }
            Ok(g.clone())
        }
        Op(op, args) => {
            if args.len() != op.arity() {
                return Err(eerr(K::OpArity, format!("{} arity", op.symbol())));
            }
            let (arg, res) = op.signature();
            for a in args {
                let ga = eps_check(env, a)?;
                if ga != Ty::Base(arg) {
                    return Err(eerr(K::Inconsistent, format!("operand has type {ga}")));
                }
            }
            Ok(Ty::Base(res))
        }
        App(f, a) => {
            let gf = eps_check(env, f)?;
            let ga = eps_check(env, a)?;
            match gf {
                Ty::Arrow(d, c) if *d == ga => Ok(*c),
                Ty::Arrow(d, _) => Err(eerr(K::Inconsistent, format!("argument {ga} is not {d}"))),
                other => Err(eerr(K::NotAFunction, format!("{other} is not a function type"))),
            }
        }
        TyApp(f, g) => {
            wf(env, g)?;
            match eps_check(env, f)? {
                Ty::Forall(x, b) => Ok(b.subst(&x, g)),
                other => Err(eerr(K::NotAForall, format!("{other} is not a universal type"))),
            }
        }
        Proj(i, a) => match eps_check(env, a)? {
            ty @ Ty::Pair(..) => Ok(proj(*i, &ty).unwrap()),
            other => Err(eerr(K::NotAPair, format!("{other} is not a pair type"))),
        },
        If(c, a, b) => {
            let gc = eps_check(env, c)?;
            if gc != Ty::Base(Base::Bool) {
                return Err(eerr(K::Inconsistent, format!("condition has type {gc}")));
            }
            let ga = eps_check(env, a)?;
            let gb = eps_check(env, b)?;
            if ga != gb {
                return Err(eerr(K::Inconsistent, format!("branches {ga} and {gb} differ")));
            }
            Ok(ga)
        }
        Pack(w, a, g) => {
            wf(env, w)?;
            wf(env, g)?;
            let Ty::Exists(x, body) = g else {
                return Err(eerr(K::NotAnExists, format!("{g} is not an existential type")));
            };
            let ga = eps_check(env, a)?;
            if ga != body.subst(x, w) {
                return Err(eerr(K::Inconsistent, format!("package body {ga} does not match {g}")));
            }
            Ok(g.clone())
        }
        Unpack(x, y, a, body) => {
            let ga = eps_check(env, a)?;
            if !matches!(ga, Ty::Exists(..)) {
                return Err(eerr(K::NotAnExists, format!("{ga} is not an existential type")));
            }
            let schema = ga.body_as(x).unwrap();
            env.tyvars.push(x.clone());
            env.vars.push((y.clone(), schema));
            let r = eps_check(env, body);
            env.vars.pop();
            env.tyvars.pop();
            let g = r?;
            wf(env, &g)?;
            Ok(g)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_gsf;
    use crate::types::*;

    fn ty_of(src: &str) -> Result<Ty, TypeError> {
        typecheck(&parse_gsf(src).unwrap())
    }

    #[test]
    fn wf_examples() {
        let mut env = TypeEnv::new();
        assert!(!wf_type(&env, &tvar("X")));
        env.tyvars.push(TyVar::new("X"));
        assert!(wf_type(&env, &arrow(tvar("X"), unk())));
        let mut s = Store::new();
        s.fresh(int());
        assert!(wf_type(&TypeEnv::with_store(s), &pair(name(0), bool_())));
    }

    #[test]
    fn consistency_examples() {
        let env = TypeEnv::new();
        assert!(!consistent(&env, &arrow(unk(), unk()), &forall("X", arrow(unk(), unk()))));
        assert!(consistent(&env, &int(), &unk()));
        assert!(consistent(&env, &int(), &unk()) && consistent(&env, &unk(), &bool_()));
        assert!(!consistent(&env, &int(), &bool_()));
        let mut s = Store::new();
        s.fresh(arrow(int(), int()));
        s.fresh(int());
        let env = TypeEnv::with_store(s);
        assert!(consistent(&env, &name(0), &arrow(name(1), name(1))));
    }

    #[test]
    fn source_typing() {
        assert_eq!(ty_of("/\\X.\\x:X.x").unwrap(), forall("X", arrow(tvar("X"), tvar("X"))));
        assert_eq!(ty_of("(\\x:?. x + 1) false").unwrap(), int());
        assert_eq!(ty_of("let g:? = /\\X.\\x:X.x in g [Int] true").unwrap(), unk());
        assert_eq!(
            ty_of("(\\x:Int.x) true").unwrap_err().kind,
            TypeErrorKind::Inconsistent
        );
        assert_eq!(
            ty_of("unpack <X,x> = pack<Int, 1> as exists X.X in x").unwrap_err().kind,
            TypeErrorKind::IllFormedType
        );
    }

    #[test]
    fn static_typing() {
        let t = parse_gsf("let f:forall X.X->X = /\\X.\\x:X.x in (f [Int] 1) + 1").unwrap();
        assert_eq!(typecheck_sf(&TypeEnv::new(), &t).unwrap(), int());
        let t = parse_gsf("\\x:?.x").unwrap();
        assert_eq!(typecheck_sf(&TypeEnv::new(), &t).unwrap_err().kind, TypeErrorKind::NotStatic);
        let t = parse_gsf("(\\x:Int.x) true").unwrap();
        assert_eq!(typecheck_sf(&TypeEnv::new(), &t).unwrap_err().kind, TypeErrorKind::Inconsistent);
    }

    #[test]
    fn eps_typing() {
        use crate::syntax::Const as C;
        let one = TermEps::asc(Evidence::refl(int()), TermEps::Const(C::Int(1)), int());
        assert_eq!(typecheck_eps(&TypeEnv::new(), &one).unwrap(), int());
        let mut s = Store::new();
        s.fresh(int());
        let sealed1 = TermEps::asc(
            Evidence::new(int(), sealed(0, int())),
            TermEps::Const(C::Int(1)),
            name(0),
        );
        assert_eq!(typecheck_eps(&TypeEnv::with_store(s), &sealed1).unwrap(), name(0));
        let bad = TermEps::asc(
            Evidence::refl(arrow(unk(), unk())),
            TermEps::Lam("x".into(), unk(), Box::new(TermEps::Var("x".into()))),
            int(),
        );
        assert!(typecheck_eps(&TypeEnv::new(), &bad).is_err());
    }
}
