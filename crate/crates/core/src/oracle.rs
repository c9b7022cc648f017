//! Brute-force oracles for precision, consistency and meet, computed from
//! the concretization of gradual types into a finite universe of static
//! types. Used by tests only.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::statics::{consistent, TypeEnv};
use crate::types::{meet, precision, Base, Ty, TyVar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    Precision,
    Consistency,
    /// The inductive meet is the greatest lower bound.
    MeetGlb,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("oracle depth {depth} is smaller than the type depth {needed}")]
    TooShallow { depth: usize, needed: usize },
    #[error("types with type names are outside the oracle universe")]
    HasNames,
}

/// Binder used at nesting level `k` in enumerated types.
fn binder(k: usize) -> TyVar {
    TyVar { name: "X".into(), id: k as u32 }
}

fn enumerate(depth: usize, bound: usize, gradual: bool) -> Vec<Ty> {
    let mut out: Vec<Ty> = vec![Ty::Base(Base::Int), Ty::Base(Base::Bool)];
    if gradual {
        out.push(Ty::Unknown);
    }
    out.extend((0..bound).map(|k| Ty::Var(binder(k))));
    if depth <= 1 {
        return out;
    }
    let sub = enumerate(depth - 1, bound, gradual);
    for a in &sub {
        for b in &sub {
            out.push(Ty::Arrow(Box::new(a.clone()), Box::new(b.clone())));
        }
    }
    for a in &sub {
        for b in &sub {
            out.push(Ty::Pair(Box::new(a.clone()), Box::new(b.clone())));
        }
    }
    let bodies = enumerate(depth - 1, bound + 1, gradual);
    let x = binder(bound);
    out.extend(bodies.iter().map(|b| Ty::Forall(x.clone(), Box::new(b.clone()))));
    out.extend(bodies.iter().map(|b| Ty::Exists(x.clone(), Box::new(b.clone()))));
    out
}

/// Closed gradual types over `{Int, Bool}` of depth at most `depth`.
pub fn gradual_universe(depth: usize) -> Vec<Ty> {
    enumerate(depth, 0, true)
}

/// A set of universe members.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }
    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
    pub fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    pub fn intersect(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
}

/// Whether static `t` is in the concretization of `g`. `env` pairs the
/// binders of `g` with those of `t`, innermost last.
fn member(t: &Ty, g: &Ty, env: &mut Vec<(TyVar, TyVar)>) -> bool {
    use Ty::*;
    match (t, g) {
        (_, Unknown) => true,
        (Base(a), Base(b)) => a == b,
        (Var(x), Var(y)) => match env.iter().rev().find(|(gy, tx)| gy == y || tx == x) {
            Some((gy, tx)) => gy == y && tx == x,
            None => x == y,
        },
        (Arrow(a1, b1), Arrow(a2, b2)) | (Pair(a1, b1), Pair(a2, b2)) => {
            member(a1, a2, env) && member(b1, b2, env)
        }
        (Forall(x, b1), Forall(y, b2)) | (Exists(x, b1), Exists(y, b2)) => {
            env.push((y.clone(), x.clone()));
            let r = member(b1, b2, env);
            env.pop();
            r
        }
        _ => false,
    }
}

/// The finite universe of closed static types up to a depth.
pub struct Universe {
    pub depth: usize,
    pub statics: Vec<Ty>,
    abstractions: Mutex<HashMap<Bits, Ty>>,
}

impl Universe {
    pub fn new(depth: usize) -> Self {
        Universe { depth, statics: enumerate(depth, 0, false), abstractions: Mutex::default() }
    }

    /// Shared universe for a depth.
    pub fn cached(depth: usize) -> Arc<Universe> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Universe>>>> = OnceLock::new();
        let mut m = CACHE.get_or_init(Mutex::default).lock().unwrap();
        m.entry(depth).or_insert_with(|| Arc::new(Universe::new(depth))).clone()
    }

    pub fn conc(&self, g: &Ty) -> Bits {
        let mut b = Bits::empty(self.statics.len());
        for (i, t) in self.statics.iter().enumerate() {
            if member(t, g, &mut Vec::new()) {
                b.set(i);
            }
        }
        b
    }

    /// The abstraction of a non-empty set.
    pub fn abstraction(&self, set: &Bits) -> Option<Ty> {
        if set.is_empty() {
            return None;
        }
        if let Some(g) = self.abstractions.lock().unwrap().get(set) {
            return Some(g.clone());
        }
        let members: Vec<&Ty> = (0..self.statics.len()).filter(|i| set.contains(*i)).map(|i| &self.statics[i]).collect();
        let g = abstract_set(&members);
        self.abstractions.lock().unwrap().insert(set.clone(), g.clone());
        Some(g)
    }

    pub fn precision(&self, g1: &Ty, g2: &Ty) -> bool {
        self.conc(g1).is_subset(&self.conc(g2))
    }

    pub fn consistency(&self, g1: &Ty, g2: &Ty) -> bool {
        !self.conc(g1).intersect(&self.conc(g2)).is_empty()
    }

    /// `A(C(g1) ∩ C(g2))`.
    pub fn meet(&self, g1: &Ty, g2: &Ty) -> Option<Ty> {
        self.abstraction(&self.conc(g1).intersect(&self.conc(g2)))
    }
}

/// Abstraction of a non-empty set of static types that share binder names
/// by nesting level.
fn abstract_set(ts: &[&Ty]) -> Ty {
    use Ty::*;
    let first = ts[0];
    let all = |f: &dyn Fn(&Ty) -> bool| ts.iter().all(|t| f(t));
    match first {
        Base(_) | Var(_) if all(&|t| t == first) => first.clone(),
        Arrow(..) if all(&|t| matches!(t, Arrow(..))) => {
            let (l, r) = split(ts);
            Arrow(Box::new(abstract_set(&l)), Box::new(abstract_set(&r)))
        }
        Pair(..) if all(&|t| matches!(t, Pair(..))) => {
            let (l, r) = split(ts);
            Pair(Box::new(abstract_set(&l)), Box::new(abstract_set(&r)))
        }
        Forall(x, _) if all(&|t| matches!(t, Forall(..))) => {
            let bodies: Vec<&Ty> = ts.iter().map(|t| match t {
                Forall(_, b) => &**b,
                _ => unreachable!(),
            }).collect();
            Forall(x.clone(), Box::new(abstract_set(&bodies)))
        }
        Exists(x, _) if all(&|t| matches!(t, Exists(..))) => {
            let bodies: Vec<&Ty> = ts.iter().map(|t| match t {
                Exists(_, b) => &**b,
                _ => unreachable!(),
            }).collect();
            Exists(x.clone(), Box::new(abstract_set(&bodies)))
        }
        _ => Unknown,
    }
}

fn split<'a>(ts: &[&'a Ty]) -> (Vec<&'a Ty>, Vec<&'a Ty>) {
    ts.iter()
        .map(|t| match t {
            Ty::Arrow(a, b) | Ty::Pair(a, b) => (&**a, &**b),
            _ => unreachable!(),
        })
        .unzip()
}

/// Check an inductive relation against its concretization-based meaning on
/// the universe of the given depth.
pub fn bounded_oracle(kind: OracleKind, g1: &Ty, g2: &Ty, depth: usize) -> Result<bool, OracleError> {
    if g1.has_names() || g2.has_names() {
        return Err(OracleError::HasNames);
    }
    let needed = g1.depth().max(g2.depth());
    if depth < needed {
        return Err(OracleError::TooShallow { depth, needed });
    }
    let u = Universe::cached(depth);
    Ok(match kind {
        OracleKind::Precision => u.precision(g1, g2),
        OracleKind::Consistency => u.consistency(g1, g2),
        OracleKind::MeetGlb => match meet(g1, g2) {
            None => !u.consistency(g1, g2),
            Some(m) => {
                let lower = |g: &Ty| u.precision(g, g1) && u.precision(g, g2);
                lower(&m) && gradual_universe(depth).iter().filter(|g| lower(g)).all(|g| u.precision(g, &m))
            }
        },
    })
}

/// Whether the inductive relation agrees with the oracle on this pair.
pub fn agrees(kind: OracleKind, g1: &Ty, g2: &Ty, depth: usize) -> Result<bool, OracleError> {
    let oracle = bounded_oracle(kind, g1, g2, depth)?;
    Ok(match kind {
        OracleKind::Precision => oracle == precision(g1, g2),
        OracleKind::Consistency => oracle == consistent(&TypeEnv::new(), g1, g2),
        OracleKind::MeetGlb => oracle,
    })
}

/// Mismatch counts from comparing the inductive relations with the oracles
/// on every pair of the gradual universe.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub types: usize,
    pub pairs: usize,
    pub precision: usize,
    pub consistency: usize,
    /// `meet(g1, g2)` differs from `A(C(g1) ∩ C(g2))`.
    pub meet: usize,
    /// Sampled pairs whose meet is not the greatest lower bound.
    pub glb_sampled: usize,
    pub glb: usize,
}

impl ExhaustiveReport {
    pub fn clean(&self) -> bool {
        self.precision == 0 && self.consistency == 0 && self.meet == 0 && self.glb == 0
    }
}

/// Compare precision, consistency and meet with the oracles on all pairs of
/// the depth-`depth` universe. The full lower-bound scan runs on every
/// `glb_stride`-th pair only.
pub fn exhaustive(depth: usize, glb_stride: usize) -> ExhaustiveReport {
    let u = Universe::cached(depth);
    let gs = gradual_universe(depth);
    let conc: Vec<Bits> = gs.iter().map(|g| u.conc(g)).collect();
    let env = TypeEnv::new();
    let mut r = ExhaustiveReport { types: gs.len(), ..Default::default() };
    let mut k = 0usize;
    for (i, g1) in gs.iter().enumerate() {
        for (j, g2) in gs.iter().enumerate() {
            r.pairs += 1;
            let (c1, c2) = (&conc[i], &conc[j]);
            if precision(g1, g2) != c1.is_subset(c2) {
                r.precision += 1;
            }
            let both = c1.intersect(c2);
            if consistent(&env, g1, g2) == both.is_empty() {
                r.consistency += 1;
            }
            let m = meet(g1, g2);
            if m != u.abstraction(&both) {
                r.meet += 1;
            }
            k += 1;
            if glb_stride > 0 && k.is_multiple_of(glb_stride) {
                r.glb_sampled += 1;
                let ok = match &m {
                    None => both.is_empty(),
                    Some(m) => {
                        let cm = u.conc(m);
                        let lower = |c: &Bits| c.is_subset(c1) && c.is_subset(c2);
                        lower(&cm) && conc.iter().filter(|c| lower(c)).all(|c| c.is_subset(&cm))
                    }
                };
                if !ok {
                    r.glb += 1;
                }
            }
        }
    }
    r
}
