//! Consistent transitivity over refined evidence, evidence inversion and
//! instantiation, outer evidence, and the implicit-polymorphism fallback.

use crate::syntax::TermEps;
use crate::types::{common_binder, lift, unlift, Evidence, Store, Ty, TyVar, TypeName};
use std::cell::RefCell;
use std::fmt;

/// Which rule family refused to combine two evidences.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refusal {
    /// Two different type names meet in the middle.
    NameMismatch,
    /// A sealed name meets an unsealed middle component.
    SealedMiddle,
    /// Distinct base types or variables.
    Atom,
    /// Distinct type constructors.
    Constructor,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Undefined(pub Refusal);

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let why = match self.0 {
            Refusal::NameMismatch => "mismatched type names",
            Refusal::SealedMiddle => "sealed value meets unsealed type",
            Refusal::Atom => "incompatible atomic types",
            Refusal::Constructor => "incompatible type constructors",
        };
        write!(f, "consistent transitivity undefined ({why})")
    }
}

pub type TransResult = Result<Evidence, Undefined>;

fn strip_seal(e: &Ty) -> Option<(TypeName, &Ty)> {
    match e {
        Ty::Sealed(a, under) => Some((*a, under)),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Head {
    Arrow,
    Pair,
    Forall,
    Exists,
}

fn head(e: &Ty) -> Option<Head> {
    match e {
        Ty::Arrow(..) => Some(Head::Arrow),
        Ty::Pair(..) => Some(Head::Pair),
        Ty::Forall(..) => Some(Head::Forall),
        Ty::Exists(..) => Some(Head::Exists),
        _ => None,
    }
}

fn expand(e: &Ty, h: Head, like: &Ty) -> Ty {
    if !e.is_unknown() {
        return e.clone();
    }
    let q = || Box::new(Ty::Unknown);
    match (h, like) {
        (Head::Arrow, _) => Ty::Arrow(q(), q()),
        (Head::Pair, _) => Ty::Pair(q(), q()),
        (Head::Forall, Ty::Forall(x, _)) => Ty::Forall(x.clone(), q()),
        (Head::Exists, Ty::Exists(x, _)) => Ty::Exists(x.clone(), q()),
        (Head::Forall, _) => Ty::Forall(TyVar::new("X"), q()),
        (Head::Exists, _) => Ty::Exists(TyVar::new("X"), q()),
    }
}

fn split(e: &Ty) -> (&Ty, &Ty) {
    match e {
        Ty::Arrow(a, b) | Ty::Pair(a, b) => (a, b),
        _ => unreachable!("split on non-binary constructor"),
    }
}

/// Consistent transitivity `e1 ∘ e2`.
pub fn trans(e1: &Evidence, e2: &Evidence) -> TransResult {
    let r = trans_in(e1, e2);
    LOG.with(|log| {
        if let Some(calls) = log.borrow_mut().as_mut() {
            calls.push(TransCall { left: e1.clone(), right: e2.clone(), result: r.clone().ok() });
        }
    });
    r
}

/// One recorded top-level use of `trans`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransCall {
    pub left: Evidence,
    pub right: Evidence,
    pub result: Option<Evidence>,
}

impl fmt::Display for TransCall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.result {
            Some(r) => write!(f, "{} o {} = {r}", self.left, self.right),
            None => write!(f, "{} o {} undefined", self.left, self.right),
        }
    }
}

thread_local! {
    static LOG: RefCell<Option<Vec<TransCall>>> = const { RefCell::new(None) };
}

/// Turn recording of `trans` calls on this thread on or off.
pub fn record_trans(on: bool) {
    LOG.with(|log| *log.borrow_mut() = on.then(Vec::new));
}

/// Calls recorded since the last take.
pub fn take_trans_calls() -> Vec<TransCall> {
    LOG.with(|log| log.borrow_mut().as_mut().map(std::mem::take).unwrap_or_default())
}

fn trans_in(e1: &Evidence, e2: &Evidence) -> TransResult {
    // outer seals
    if let Some((a, under)) = strip_seal(&e1.left) {
        let r = trans_in(&Evidence::new(under.clone(), e1.right.clone()), e2)?;
        return Ok(Evidence::new(Ty::Sealed(a, Box::new(r.left)), r.right));
    }
    if let Some((a, under)) = strip_seal(&e2.right) {
        let r = trans_in(e1, &Evidence::new(e2.left.clone(), under.clone()))?;
        return Ok(Evidence::new(r.left, Ty::Sealed(a, Box::new(r.right))));
    }
    // unsealing against the same name
    if let (Some((a, u1)), Some((b, u2))) = (strip_seal(&e1.right), strip_seal(&e2.left)) {
        if a != b {
            return Err(Undefined(Refusal::NameMismatch));
        }
        return trans_in(
            &Evidence::new(e1.left.clone(), u1.clone()),
            &Evidence::new(u2.clone(), e2.right.clone()),
        );
    }
    let unknown = Evidence::unknown();
    if *e2 == unknown {
        return Ok(e1.clone());
    }
    if *e1 == unknown {
        return Ok(e2.clone());
    }
    if matches!(e1.right, Ty::Sealed(..)) || matches!(e2.left, Ty::Sealed(..)) {
        return Err(Undefined(Refusal::SealedMiddle));
    }
    let parts = [&e1.left, &e1.right, &e2.left, &e2.right];
    let known: Vec<&Ty> = parts.iter().copied().filter(|t| !t.is_unknown()).collect();
    if known.is_empty() {
        return Ok(unknown);
    }
    let Some(h) = head(known[0]) else {
        // atoms: bases and variables
        let a = known[0];
        if known.iter().all(|t| *t == a) {
            return Ok(Evidence::refl(a.clone()));
        }
        return Err(Undefined(if known.iter().all(|t| head(t).is_none()) {
            Refusal::Atom
        } else {
            Refusal::Constructor
        }));
    };
    if known.iter().any(|t| head(t) != Some(h)) {
        return Err(Undefined(Refusal::Constructor));
    }
    let like = known[0];
    let [l1, r1, l2, r2] = parts.map(|t| expand(t, h, like));
    match h {
        Head::Arrow => {
            let ((a1, b1), (a2, b2), (a3, b3), (a4, b4)) =
                (split(&l1), split(&r1), split(&l2), split(&r2));
            let d = trans_in(
                &Evidence::new(a4.clone(), a3.clone()),
                &Evidence::new(a2.clone(), a1.clone()),
            )?;
            let c = trans_in(
                &Evidence::new(b1.clone(), b2.clone()),
                &Evidence::new(b3.clone(), b4.clone()),
            )?;
            Ok(Evidence::new(
                Ty::Arrow(Box::new(d.right), Box::new(c.left)),
                Ty::Arrow(Box::new(d.left), Box::new(c.right)),
            ))
        }
        Head::Pair => {
            let ((a1, b1), (a2, b2), (a3, b3), (a4, b4)) =
                (split(&l1), split(&r1), split(&l2), split(&r2));
            let p = trans_in(
                &Evidence::new(a1.clone(), a2.clone()),
                &Evidence::new(a3.clone(), a4.clone()),
            )?;
            let q = trans_in(
                &Evidence::new(b1.clone(), b2.clone()),
                &Evidence::new(b3.clone(), b4.clone()),
            )?;
            Ok(Evidence::new(
                Ty::Pair(Box::new(p.left), Box::new(q.left)),
                Ty::Pair(Box::new(p.right), Box::new(q.right)),
            ))
        }
        Head::Forall | Head::Exists => {
            let binders: Vec<(&TyVar, &Ty)> = [&l1, &r1, &l2, &r2]
                .iter()
                .map(|t| match t {
                    Ty::Forall(x, b) | Ty::Exists(x, b) => (x, &**b),
                    _ => unreachable!(),
                })
                .collect();
            let (x, bs) = common_binder(&binders);
            let r = trans_in(
                &Evidence::new(bs[0].clone(), bs[1].clone()),
                &Evidence::new(bs[2].clone(), bs[3].clone()),
            )?;
            let wrap = |b: Ty| {
                if h == Head::Forall {
                    Ty::Forall(x.clone(), Box::new(b))
                } else {
                    Ty::Exists(x.clone(), Box::new(b))
                }
            };
            Ok(Evidence::new(wrap(r.left), wrap(r.right)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inversion {
    Dom,
    Cod,
    Proj1,
    Proj2,
}

fn arrow_parts(e: &Ty) -> Option<(Ty, Ty)> {
    match e {
        Ty::Arrow(a, b) => Some(((**a).clone(), (**b).clone())),
        Ty::Unknown => Some((Ty::Unknown, Ty::Unknown)),
        _ => None,
    }
}

fn pair_parts(e: &Ty) -> Option<(Ty, Ty)> {
    match e {
        Ty::Pair(a, b) => Some(((**a).clone(), (**b).clone())),
        Ty::Unknown => Some((Ty::Unknown, Ty::Unknown)),
        _ => None,
    }
}

/// Evidence inversion. `None` if a component has the wrong constructor.
pub fn ev_invert(kind: Inversion, e: &Evidence) -> Option<Evidence> {
    Some(match kind {
        Inversion::Dom => {
            let (l, _) = arrow_parts(&e.left)?;
            let (r, _) = arrow_parts(&e.right)?;
            Evidence::new(r, l)
        }
        Inversion::Cod => {
            let (_, l) = arrow_parts(&e.left)?;
            let (_, r) = arrow_parts(&e.right)?;
            Evidence::new(l, r)
        }
        Inversion::Proj1 => Evidence::new(pair_parts(&e.left)?.0, pair_parts(&e.right)?.0),
        Inversion::Proj2 => Evidence::new(pair_parts(&e.left)?.1, pair_parts(&e.right)?.1),
    })
}

pub fn ev_pair(e1: &Evidence, e2: &Evidence) -> Evidence {
    Evidence::new(
        Ty::Pair(Box::new(e1.left.clone()), Box::new(e2.left.clone())),
        Ty::Pair(Box::new(e1.right.clone()), Box::new(e2.right.clone())),
    )
}

fn forall_inst(e: &Ty, arg: &Ty) -> Option<Ty> {
    match e {
        Ty::Forall(x, b) => Some(b.subst(x, arg)),
        Ty::Unknown => Some(Ty::Unknown),
        _ => None,
    }
}

fn exists_inst(e: &Ty, arg: &Ty) -> Option<Ty> {
    match e {
        Ty::Exists(x, b) => Some(b.subst(x, arg)),
        Ty::Unknown => Some(Ty::Unknown),
        _ => None,
    }
}

/// `ε[E]`: instantiate both universal components.
pub fn ev_inst(e: &Evidence, arg: &Ty) -> Option<Evidence> {
    Some(Evidence::new(forall_inst(&e.left, arg)?, forall_inst(&e.right, arg)?))
}

/// Outer evidence for a type application binding `alpha := g_arg`.
/// `store_ext` must already contain the new binding.
pub fn out_evidence(
    e: &Evidence,
    alpha: TypeName,
    g_arg: &Ty,
    store: &Store,
    store_ext: &Store,
) -> Option<Evidence> {
    let star = lift(store, &unlift(&e.right));
    let sealed = lift(store_ext, &Ty::Name(alpha));
    let arg = lift(store, g_arg);
    Some(Evidence::new(forall_inst(&star, &sealed)?, forall_inst(&star, &arg)?))
}

/// `ε[E_rep, E_name]` for unpacking.
pub fn ev_inst_exists(e: &Evidence, e_rep: &Ty, e_name: &Ty) -> Option<Evidence> {
    Some(Evidence::new(exists_inst(&e.left, e_rep)?, exists_inst(&e.right, e_name)?))
}

fn both_forall(e: &Evidence) -> bool {
    matches!((&e.left, &e.right), (Ty::Forall(..), Ty::Forall(..)))
}

fn both_arrow(e: &Evidence) -> bool {
    matches!((&e.left, &e.right), (Ty::Arrow(..), Ty::Arrow(..)))
}

fn schm(e: &Ty, x: &TyVar) -> Ty {
    match e {
        Ty::Forall(..) => e.body_as(x).unwrap(),
        _ => Ty::Unknown,
    }
}

fn dom_cod(e: &Ty) -> Ty {
    let (d, c) = arrow_parts(e).unwrap_or((Ty::Unknown, Ty::Unknown));
    Ty::Arrow(Box::new(d), Box::new(c))
}

fn q() -> Ty {
    Ty::Unknown
}

/// Adjust a value whose evidence failed to combine with `e2`. Returns `None`
/// when the failure has nothing to do with implicit polymorphism.
pub fn dip(store: &Store, v: &TermEps, e2: &Evidence) -> Option<TermEps> {
    let TermEps::Asc(e1, u, g1) = v else { return None };
    let lifted = lift(store, g1);
    if !both_forall(e1) && both_forall(e2) {
        let x = TyVar::new("X");
        let ev = Evidence::refl(Ty::Forall(x.clone(), Box::new(lifted)));
        let inner = TermEps::asc(e1.clone(), (**u).clone(), q());
        return Some(TermEps::asc(ev, TermEps::TyLam(x, Box::new(inner)), g1.clone()));
    }
    if let TermEps::TyLam(..) = **u {
        if both_forall(e1) && !both_forall(e2) {
            let poly = TermEps::asc(
                e1.clone(),
                (**u).clone(),
                Ty::Forall(TyVar::new("X"), Box::new(q())),
            );
            let inst = TermEps::TyApp(Box::new(poly), q());
            return Some(TermEps::asc(Evidence::refl(lifted), inst, g1.clone()));
        }
    }
    if both_arrow(e1) && both_arrow(e2) {
        let proxy_ev = Evidence::refl(dom_cod(&lifted));
        let f = TermEps::asc(e1.clone(), (**u).clone(), Ty::Arrow(Box::new(q()), Box::new(q())));
        let arg = TermEps::asc(Evidence::unknown(), TermEps::Var("y".into()), q());
        let body = TermEps::App(Box::new(f), Box::new(arg));
        return Some(TermEps::asc(
            proxy_ev,
            TermEps::Lam("y".into(), q(), Box::new(body)),
            g1.clone(),
        ));
    }
    if let TermEps::TyLam(x, t) = &**u {
        if both_forall(e1) && both_forall(e2) {
            let outer = Ty::Forall(x.clone(), Box::new(schm(&lifted, x)));
            let inner_ev = Evidence::new(schm(&e1.left, x), schm(&e1.right, x));
            let body = TermEps::asc(inner_ev, (**t).clone(), q());
            return Some(TermEps::asc(
                Evidence::refl(outer),
                TermEps::TyLam(x.clone(), Box::new(body)),
                g1.clone(),
            ));
        }
    }
    None
}
