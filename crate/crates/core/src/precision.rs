//! Term precision, and strict precision on source terms, evidence terms,
//! stores and configurations.

use crate::statics::{typecheck_eps, TypeEnv};
use crate::syntax::{Term, TermEps, TermKind};
use crate::types::{
    cod, dom, evidence_strict, inst, join, matches_to, meet, precision, proj, strict_type_precision,
    unlift, Base, Store, Ty, TyVar,
};

/// Ω: variables bound to a pair of types related by precision.
#[derive(Clone, Debug, Default)]
pub struct PrecCtx {
    pub vars: Vec<(String, Ty, Ty)>,
}

impl PrecCtx {
    pub fn new() -> Self {
        PrecCtx::default()
    }

    fn lookup(&self, x: &str) -> Option<(Ty, Ty)> {
        self.vars
            .iter()
            .rev()
            .find(|(y, _, _)| y == x)
            .map(|(_, a, b)| (a.clone(), b.clone()))
    }

    fn with<T>(&mut self, x: &str, a: Ty, b: Ty, f: impl FnOnce(&mut Self) -> T) -> T {
        self.vars.push((x.to_string(), a, b));
        let r = f(self);
        self.vars.pop();
        r
    }
}

/// Same structure, every annotation of `t1` at least as precise as in `t2`.
pub fn term_precision(t1: &Term, t2: &Term) -> bool {
    use TermKind::*;
    let p = precision;
    match (&t1.kind, &t2.kind) {
        (Const(a), Const(b)) => a == b,
        (Var(a), Var(b)) => a == b,
        (Lam(x, g1, b1), Lam(y, g2, b2)) => x == y && p(g1, g2) && term_precision(b1, b2),
        (TyLam(x, b1), TyLam(y, b2)) => x == y && term_precision(b1, b2),
        (Pair(a1, b1), Pair(a2, b2)) | (App(a1, b1), App(a2, b2)) => {
            term_precision(a1, a2) && term_precision(b1, b2)
        }
        (Asc(a1, g1), Asc(a2, g2)) | (TyApp(a1, g1), TyApp(a2, g2)) => {
            p(g1, g2) && term_precision(a1, a2)
        }
        (Op(o1, a1), Op(o2, a2)) => {
            o1 == o2 && a1.len() == a2.len() && a1.iter().zip(a2).all(|(x, y)| term_precision(x, y))
        }
        (Proj(i, a1), Proj(j, a2)) => i == j && term_precision(a1, a2),
        (If(a1, b1, c1), If(a2, b2, c2)) => {
            term_precision(a1, a2) && term_precision(b1, b2) && term_precision(c1, c2)
        }
        (Let(x, g1, a1, b1), Let(y, g2, a2, b2)) => {
            let anns = match (g1, g2) {
                (Some(g1), Some(g2)) => p(g1, g2),
                (None, None) => true,
                _ => false,
            };
            x == y && anns && term_precision(a1, a2) && term_precision(b1, b2)
        }
        (Pack(w1, a1, g1), Pack(w2, a2, g2)) => p(w1, w2) && p(g1, g2) && term_precision(a1, a2),
        (Unpack(x1, y1, a1, b1), Unpack(x2, y2, a2, b2)) => {
            x1 == x2 && y1 == y2 && term_precision(a1, a2) && term_precision(b1, b2)
        }
        _ => false,
    }
}

fn is_source_value(t: &Term) -> bool {
    matches!(t.kind, TermKind::Const(_) | TermKind::Lam(..) | TermKind::TyLam(..))
}

fn strict_meets(a1: &Ty, b1: &Ty, a2: &Ty, b2: &Ty) -> bool {
    match (meet(a1, b1), meet(a2, b2)) {
        (Some(m1), Some(m2)) => strict_type_precision(&m1, &m2),
        _ => false,
    }
}

/// Strict precision of source terms. Returns both types when related.
pub fn strict_term_precision_gsf(ctx: &mut PrecCtx, t1: &Term, t2: &Term) -> Option<(Ty, Ty)> {
    use TermKind::*;
    if is_source_value(t1) && is_source_value(t2) {
        let (g1, g2) = strict_value_gsf(ctx, t1, t2)?;
        return strict_type_precision(&g1, &g2).then_some((g1, g2));
    }
    match (&t1.kind, &t2.kind) {
        (Var(x), Var(y)) if x == y => ctx.lookup(x),
        (Asc(a1, g1), Asc(a2, g2)) => {
            if !precision(g1, g2) {
                return None;
            }
            let (h1, h2) = if is_source_value(a1) && is_source_value(a2) {
                strict_value_gsf(ctx, a1, a2)?
            } else if !is_source_value(a1) && !is_source_value(a2) {
                strict_term_precision_gsf(ctx, a1, a2)?
            } else {
                return None;
            };
            strict_meets(&h1, g1, &h2, g2).then(|| (g1.clone(), g2.clone()))
        }
        (App(f1, a1), App(f2, a2)) => {
            let (h1, h2) = strict_term_precision_gsf(ctx, f1, f2)?;
            let (k1, k2) = strict_term_precision_gsf(ctx, a1, a2)?;
            let (d1, d2) = (dom(&h1)?, dom(&h2)?);
            strict_meets(&k1, &d1, &k2, &d2).then(|| (cod(&h1).unwrap(), cod(&h2).unwrap()))
        }
        (TyApp(f1, g1), TyApp(f2, g2)) => {
            let (h1, h2) = strict_term_precision_gsf(ctx, f1, f2)?;
            if !strict_type_precision(g1, g2) {
                return None;
            }
            Some((inst(&h1, g1)?, inst(&h2, g2)?))
        }
        (Pair(a1, b1), Pair(a2, b2)) => {
            let (h1, h2) = strict_term_precision_gsf(ctx, a1, a2)?;
            let (k1, k2) = strict_term_precision_gsf(ctx, b1, b2)?;
            Some((Ty::Pair(Box::new(h1), Box::new(k1)), Ty::Pair(Box::new(h2), Box::new(k2))))
        }
        (Proj(i, a1), Proj(j, a2)) if i == j => {
            let (h1, h2) = strict_term_precision_gsf(ctx, a1, a2)?;
            Some((proj(*i, &h1)?, proj(*i, &h2)?))
        }
        (Op(o1, as1), Op(o2, as2)) if o1 == o2 && as1.len() == as2.len() => {
            let (arg, res) = o1.signature();
            let b = Ty::Base(arg);
            for (x, y) in as1.iter().zip(as2) {
                let (h1, h2) = strict_term_precision_gsf(ctx, x, y)?;
                if !strict_meets(&h1, &b, &h2, &b) {
                    return None;
                }
            }
            Some((Ty::Base(res), Ty::Base(res)))
        }
        (If(c1, a1, b1), If(c2, a2, b2)) => {
            let (h1, h2) = strict_term_precision_gsf(ctx, c1, c2)?;
            let b = Ty::Base(Base::Bool);
            if !strict_meets(&h1, &b, &h2, &b) {
                return None;
            }
            let (p1, p2) = strict_term_precision_gsf(ctx, a1, a2)?;
            let (q1, q2) = strict_term_precision_gsf(ctx, b1, b2)?;
            // both branches are ascribed to the join
            let (j1, j2) = (join(&p1, &q1)?, join(&p2, &q2)?);
            if !precision(&j1, &j2) {
                return None;
            }
            strict_meets(&p1, &j1, &p2, &j2).then_some(())?;
            strict_meets(&q1, &j1, &q2, &j2).then_some((j1, j2))
        }
        (Let(x, g1, a1, b1), Let(y, g2, a2, b2)) if x == y => {
            // as an application of an abstraction
            let (h1, h2) = strict_term_precision_gsf(ctx, a1, a2)?;
            let ann1 = g1.clone().unwrap_or_else(|| h1.clone());
            let ann2 = g2.clone().unwrap_or_else(|| h2.clone());
            if !precision(&ann1, &ann2) {
                return None;
            }
            let (r1, r2) = ctx.with(x, ann1.clone(), ann2.clone(), |c| {
                strict_term_precision_gsf(c, b1, b2)
            })?;
            let f1 = Ty::Arrow(Box::new(ann1.clone()), Box::new(r1.clone()));
            let f2 = Ty::Arrow(Box::new(ann2.clone()), Box::new(r2.clone()));
            (strict_type_precision(&f1, &f2) && strict_meets(&h1, &ann1, &h2, &ann2))
                .then_some((r1, r2))
        }
        (Pack(w1, a1, g1), Pack(w2, a2, g2)) => {
            if !strict_type_precision(w1, w2) || !strict_type_precision(g1, g2) {
                return None;
            }
            let (h1, h2) = strict_term_precision_gsf(ctx, a1, a2)?;
            let (Ty::Exists(x1, s1), Ty::Exists(x2, s2)) = (g1, g2) else { return None };
            let (e1, e2) = (s1.subst(x1, w1), s2.subst(x2, w2));
            strict_meets(&h1, &e1, &h2, &e2).then(|| (g1.clone(), g2.clone()))
        }
        (Unpack(x1, y1, a1, b1), Unpack(x2, y2, a2, b2)) if x1 == x2 && y1 == y2 => {
            let (h1, h2) = strict_term_precision_gsf(ctx, a1, a2)?;
            let s1 = schema_as(&h1, x1)?;
            let s2 = schema_as(&h2, x1)?;
            ctx.with(y1, s1, s2, |c| strict_term_precision_gsf(c, b1, b2))
        }
        _ => None,
    }
}

fn schema_as(g: &Ty, x: &TyVar) -> Option<Ty> {
    match g {
        Ty::Exists(..) => g.body_as(x),
        Ty::Unknown => Some(Ty::Unknown),
        _ => None,
    }
}

fn strict_value_gsf(ctx: &mut PrecCtx, t1: &Term, t2: &Term) -> Option<(Ty, Ty)> {
    use TermKind::*;
    match (&t1.kind, &t2.kind) {
        (Const(a), Const(b)) if a == b => Some((Ty::Base(a.base()), Ty::Base(a.base()))),
        (Lam(x, g1, b1), Lam(y, g2, b2)) if x == y && precision(g1, g2) => {
            let (r1, r2) = ctx.with(x, g1.clone(), g2.clone(), |c| strict_term_precision_gsf(c, b1, b2))?;
            Some((
                Ty::Arrow(Box::new(g1.clone()), Box::new(r1)),
                Ty::Arrow(Box::new(g2.clone()), Box::new(r2)),
            ))
        }
        (TyLam(x, b1), TyLam(y, b2)) if x == y => {
            // a literal body elaborates to a raw value under the binder
            let (r1, r2) = if is_source_value(b1) && is_source_value(b2) {
                strict_value_gsf(ctx, b1, b2)?
            } else {
                strict_term_precision_gsf(ctx, b1, b2)?
            };
            Some((Ty::Forall(x.clone(), Box::new(r1)), Ty::Forall(x.clone(), Box::new(r2))))
        }
        _ => None,
    }
}

/// Strict precision of evidence terms (raw values included).
pub fn strict_term_precision_eps(ctx: &mut PrecCtx, t1: &TermEps, t2: &TermEps) -> Option<(Ty, Ty)> {
    use TermEps::*;
    match (t1, t2) {
        (Const(a), Const(b)) if a == b => Some((Ty::Base(a.base()), Ty::Base(a.base()))),
        (Var(x), Var(y)) if x == y => ctx.lookup(x),
        (Lam(x, g1, b1), Lam(y, g2, b2)) if x == y && precision(g1, g2) => {
            let (r1, r2) = ctx.with(x, g1.clone(), g2.clone(), |c| strict_term_precision_eps(c, b1, b2))?;
            Some((
                Ty::Arrow(Box::new(g1.clone()), Box::new(r1)),
                Ty::Arrow(Box::new(g2.clone()), Box::new(r2)),
            ))
        }
        (TyLam(x, b1), TyLam(y, b2)) => {
            let renamed;
            let b2 = if x == y {
                &**b2
            } else {
                let v = Ty::Var(x.clone());
                renamed = b2.subst_ty(y, &v, &v);
                &renamed
            };
            let (r1, r2) = strict_term_precision_eps(ctx, b1, b2)?;
            Some((Ty::Forall(x.clone(), Box::new(r1)), Ty::Forall(x.clone(), Box::new(r2))))
        }
        (Asc(e1, s1, g1), Asc(e2, s2, g2)) => {
            if !precision(g1, g2) {
                return None;
            }
            let (h1, h2) = strict_term_precision_eps(ctx, s1, s2)?;
            if evidence_strict(e1, e2) {
                return Some((g1.clone(), g2.clone()));
            }
            let refl_of = |e: &crate::types::Evidence, g: &Ty| e.left == e.right && unlift(&e.left) == *g;
            let terms = !s1.is_raw() && !s2.is_raw();
            (terms && refl_of(e1, g1) && refl_of(e2, g2) && matches_to(&h1, g1) && matches_to(&h2, g2))
                .then(|| (g1.clone(), g2.clone()))
        }
        (App(f1, a1), App(f2, a2)) => {
            let (h1, h2) = strict_term_precision_eps(ctx, f1, f2)?;
            strict_term_precision_eps(ctx, a1, a2)?;
            Some((cod_of(&h1)?, cod_of(&h2)?))
        }
        (TyApp(f1, g1), TyApp(f2, g2)) => {
            let (h1, h2) = strict_term_precision_eps(ctx, f1, f2)?;
            if !strict_type_precision(g1, g2) {
                return None;
            }
            match (&h1, &h2) {
                (Ty::Forall(..), Ty::Forall(..)) => Some((inst(&h1, g1)?, inst(&h2, g2)?)),
                _ => None,
            }
        }
        (Pair(a1, b1), Pair(a2, b2)) => {
            let (h1, h2) = strict_term_precision_eps(ctx, a1, a2)?;
            let (k1, k2) = strict_term_precision_eps(ctx, b1, b2)?;
            Some((Ty::Pair(Box::new(h1), Box::new(k1)), Ty::Pair(Box::new(h2), Box::new(k2))))
        }
        (Proj(i, a1), Proj(j, a2)) if i == j => {
            let (h1, h2) = strict_term_precision_eps(ctx, a1, a2)?;
            match (&h1, &h2) {
                (Ty::Pair(..), Ty::Pair(..)) => Some((proj(*i, &h1)?, proj(*i, &h2)?)),
                _ => None,
            }
        }
        (Op(o1, as1), Op(o2, as2)) if o1 == o2 && as1.len() == as2.len() => {
            for (x, y) in as1.iter().zip(as2) {
                strict_term_precision_eps(ctx, x, y)?;
            }
            let r = Ty::Base(o1.signature().1);
            Some((r.clone(), r))
        }
        (If(c1, a1, b1), If(c2, a2, b2)) => {
            strict_term_precision_eps(ctx, c1, c2)?;
            let r = strict_term_precision_eps(ctx, a1, a2)?;
            strict_term_precision_eps(ctx, b1, b2)?;
            Some(r)
        }
        (Pack(w1, a1, g1), Pack(w2, a2, g2)) => {
            if !strict_type_precision(w1, w2) || !precision(g1, g2) {
                return None;
            }
            strict_term_precision_eps(ctx, a1, a2)?;
            Some((g1.clone(), g2.clone()))
        }
        (Unpack(x1, y1, a1, b1), Unpack(x2, y2, a2, b2)) if x1 == x2 && y1 == y2 => {
            let (h1, h2) = strict_term_precision_eps(ctx, a1, a2)?;
            let (s1, s2) = match (&h1, &h2) {
                (Ty::Exists(..), Ty::Exists(..)) => (h1.body_as(x1)?, h2.body_as(x1)?),
                _ => return None,
            };
            ctx.with(y1, s1, s2, |c| strict_term_precision_eps(c, b1, b2))
        }
        _ => None,
    }
}

fn cod_of(g: &Ty) -> Option<Ty> {
    match g {
        Ty::Arrow(_, c) => Some((**c).clone()),
        _ => None,
    }
}

/// Pointwise strict precision on a common domain.
pub fn store_precision(s1: &Store, s2: &Store) -> bool {
    s1.len() == s2.len()
        && s1
            .iter()
            .all(|(a, g1)| s2.get(*a).is_some_and(|g2| strict_type_precision(g1, g2)))
}

pub fn config_precision(s1: &Store, t1: &TermEps, s2: &Store, t2: &TermEps) -> bool {
    store_precision(s1, s2)
        && strict_term_precision_eps(&mut PrecCtx::new(), t1, t2).is_some()
        && typecheck_eps(&TypeEnv::with_store(s1.clone()), t1).is_ok()
        && typecheck_eps(&TypeEnv::with_store(s2.clone()), t2).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elaborate::{elaborate_with, Mode};
    use crate::parser::parse_gsf;

    fn p(s: &str) -> Term {
        parse_gsf(s).unwrap()
    }

    const ID_X: &str = "/\\X.\\x:X.x::X";
    const ID_Q: &str = "/\\X.\\x:?.x::X";

    #[test]
    fn term_precision_examples() {
        assert!(term_precision(&p(ID_X), &p(ID_Q)));
        assert!(!term_precision(&p("\\x:Int.x"), &p("\\x:Bool.x")));
        assert!(term_precision(&p(ID_Q), &p(ID_Q)));
    }

    #[test]
    fn strict_gsf_examples() {
        let a = p(&format!("({ID_X}) :: forall X.X->X"));
        let b = p(&format!("({ID_X}) :: forall X.?->X"));
        let c = p(&format!("({ID_Q}) :: forall X.X->X"));
        assert!(strict_term_precision_gsf(&mut PrecCtx::new(), &a, &b).is_some());
        assert!(strict_term_precision_gsf(&mut PrecCtx::new(), &a, &c).is_some());
        let d = p(&format!("({ID_X}) [Int] 1"));
        let e = p(&format!("({ID_Q}) [Int] 1"));
        assert!(strict_term_precision_gsf(&mut PrecCtx::new(), &d, &e).is_none());
    }

    #[test]
    fn strict_eps_examples() {
        let el = |s: &str| elaborate_with(&p(s), Mode::Uniform).unwrap().0;
        let a = el(&format!("({ID_X}) :: forall X.X->X"));
        let b = el(&format!("({ID_X}) :: forall X.?->X"));
        assert!(strict_term_precision_eps(&mut PrecCtx::new(), &a, &a).is_some());
        assert!(strict_term_precision_eps(&mut PrecCtx::new(), &a, &b).is_some());
        let x = el(ID_X);
        let q = el(ID_Q);
        assert!(strict_term_precision_eps(&mut PrecCtx::new(), &x, &q).is_none());
    }

    #[test]
    fn store_direction() {
        let mut s1 = Store::new();
        s1.fresh(crate::types::int());
        let mut s2 = Store::new();
        s2.fresh(Ty::Unknown);
        let v = elaborate_with(&p("1"), Mode::Uniform).unwrap().0;
        assert!(config_precision(&s1, &v, &s2, &v));
        assert!(!config_precision(&s2, &v, &s1, &v));
    }
}
