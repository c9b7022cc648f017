//! Gradual types, evidence types and the relations between them.
//!
//! One tree type serves both roles. Gradual types use `Name` for type names;
//! evidence types use `Sealed` instead and never contain a bare `Name`.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    Int,
    Bool,
    Unit,
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::Int => "Int",
            Base::Bool => "Bool",
            Base::Unit => "Unit",
        })
    }
}

/// A type variable. The index disambiguates renamed binders and is printed
/// as trailing primes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TyVar {
    pub name: String,
    pub id: u32,
}

impl TyVar {
    pub fn new(name: impl Into<String>) -> Self {
        TyVar { name: name.into(), id: 0 }
    }
}

impl fmt::Display for TyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        for _ in 0..self.id {
            f.write_str("'")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeName(pub u32);

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

#[derive(Clone, Debug)]
pub enum Ty {
    Base(Base),
    Arrow(Box<Ty>, Box<Ty>),
    Forall(TyVar, Box<Ty>),
    Pair(Box<Ty>, Box<Ty>),
    Exists(TyVar, Box<Ty>),
    Var(TyVar),
    Name(TypeName),
    /// `a^E`: a type name carrying its transitive store binding (evidence only).
    Sealed(TypeName, Box<Ty>),
    Unknown,
}

use Ty::*;

pub fn int() -> Ty {
    Base(self::Base::Int)
}
pub fn bool_() -> Ty {
    Base(self::Base::Bool)
}
pub fn unit() -> Ty {
    Base(self::Base::Unit)
}
pub fn unk() -> Ty {
    Unknown
}
pub fn arrow(a: Ty, b: Ty) -> Ty {
    Arrow(Box::new(a), Box::new(b))
}
pub fn pair(a: Ty, b: Ty) -> Ty {
    Pair(Box::new(a), Box::new(b))
}
pub fn forall(x: &str, body: Ty) -> Ty {
    Forall(TyVar::new(x), Box::new(body))
}
pub fn exists(x: &str, body: Ty) -> Ty {
    Exists(TyVar::new(x), Box::new(body))
}
pub fn tvar(x: &str) -> Ty {
    Var(TyVar::new(x))
}
pub fn name(a: u32) -> Ty {
    Name(TypeName(a))
}
pub fn sealed(a: u32, under: Ty) -> Ty {
    Sealed(TypeName(a), Box::new(under))
}

/// Resolve a variable under a stack of paired binders. `Some(i)` is the
/// binder depth of the match, `None` means free.
fn lookup(env: &[(&TyVar, &TyVar)], a: &TyVar, left: bool) -> Option<usize> {
    env.iter()
        .rposition(|(l, r)| if left { *l == a } else { *r == a })
}

fn vars_match(env: &[(&TyVar, &TyVar)], a: &TyVar, b: &TyVar) -> bool {
    match (lookup(env, a, true), lookup(env, b, false)) {
        (Some(i), Some(j)) => i == j,
        (None, None) => a == b,
        _ => false,
    }
}

impl PartialEq for Ty {
    fn eq(&self, other: &Ty) -> bool {
        alpha_eq(&mut Vec::new(), self, other)
    }
}

fn alpha_eq<'a>(env: &mut Vec<(&'a TyVar, &'a TyVar)>, a: &'a Ty, b: &'a Ty) -> bool {
    match (a, b) {
        (Base(x), Base(y)) => x == y,
        (Unknown, Unknown) => true,
        (Name(x), Name(y)) => x == y,
        (Var(x), Var(y)) => vars_match(env, x, y),
        (Sealed(x, e1), Sealed(y, e2)) => x == y && alpha_eq(env, e1, e2),
        (Arrow(a1, b1), Arrow(a2, b2)) | (Pair(a1, b1), Pair(a2, b2)) => {
            alpha_eq(env, a1, a2) && alpha_eq(env, b1, b2)
        }
        (Forall(x, b1), Forall(y, b2)) | (Exists(x, b1), Exists(y, b2)) => {
            env.push((x, y));
            let r = alpha_eq(env, b1, b2);
            env.pop();
            r
        }
        _ => false,
    }
}

impl Ty {
    pub fn is_unknown(&self) -> bool {
        matches!(self, Unknown)
    }

    /// No `Unknown` anywhere.
    pub fn is_static(&self) -> bool {
        match self {
            Unknown => false,
            Base(_) | Var(_) | Name(_) => true,
            Sealed(_, e) => e.is_static(),
            Arrow(a, b) | Pair(a, b) => a.is_static() && b.is_static(),
            Forall(_, b) | Exists(_, b) => b.is_static(),
        }
    }

    pub fn has_names(&self) -> bool {
        match self {
            Name(_) | Sealed(..) => true,
            Base(_) | Var(_) | Unknown => false,
            Arrow(a, b) | Pair(a, b) => a.has_names() || b.has_names(),
            Forall(_, b) | Exists(_, b) => b.has_names(),
        }
    }

    /// Syntactic depth; atoms have depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Base(_) | Var(_) | Name(_) | Unknown => 1,
            Sealed(_, e) => 1 + e.depth(),
            Arrow(a, b) | Pair(a, b) => 1 + a.depth().max(b.depth()),
            Forall(_, b) | Exists(_, b) => 1 + b.depth(),
        }
    }

    pub fn has_free(&self, x: &TyVar) -> bool {
        match self {
            Var(y) => y == x,
            Base(_) | Name(_) | Unknown => false,
            Sealed(_, e) => e.has_free(x),
            Arrow(a, b) | Pair(a, b) => a.has_free(x) || b.has_free(x),
            Forall(y, b) | Exists(y, b) => y != x && b.has_free(x),
        }
    }

    pub fn free_vars(&self) -> Vec<TyVar> {
        fn go(t: &Ty, bound: &mut Vec<TyVar>, out: &mut Vec<TyVar>) {
            match t {
                Var(y) => {
                    if !bound.contains(y) && !out.contains(y) {
                        out.push(y.clone());
                    }
                }
                Base(_) | Name(_) | Unknown => {}
                Sealed(_, e) => go(e, bound, out),
                Arrow(a, b) | Pair(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Forall(y, b) | Exists(y, b) => {
                    bound.push(y.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Largest variable index mentioned anywhere, bound or free.
    pub fn max_var_id(&self) -> u32 {
        match self {
            Var(y) => y.id,
            Base(_) | Name(_) | Unknown => 0,
            Sealed(_, e) => e.max_var_id(),
            Arrow(a, b) | Pair(a, b) => a.max_var_id().max(b.max_var_id()),
            Forall(y, b) | Exists(y, b) => y.id.max(b.max_var_id()),
        }
    }

    /// Capture-avoiding substitution `self[r/x]`.
    pub fn subst(&self, x: &TyVar, r: &Ty) -> Ty {
        match self {
            Var(y) => {
                if y == x {
                    r.clone()
                } else {
                    self.clone()
                }
            }
            Base(_) | Name(_) | Unknown => self.clone(),
            Sealed(a, e) => Sealed(*a, Box::new(e.subst(x, r))),
            Arrow(a, b) => Arrow(Box::new(a.subst(x, r)), Box::new(b.subst(x, r))),
            Pair(a, b) => Pair(Box::new(a.subst(x, r)), Box::new(b.subst(x, r))),
            Forall(y, b) | Exists(y, b) => {
                let (y2, b2) = if y == x || !b.has_free(x) {
                    (y.clone(), (**b).clone())
                } else if r.has_free(y) {
                    let fresh = TyVar {
                        name: y.name.clone(),
                        id: 1 + r.max_var_id().max(b.max_var_id()).max(x.id).max(y.id),
                    };
                    let b1 = b.subst(y, &Var(fresh.clone()));
                    let b2 = b1.subst(x, r);
                    (fresh, b2)
                } else {
                    (y.clone(), b.subst(x, r))
                };
                if matches!(self, Forall(..)) {
                    Forall(y2, Box::new(b2))
                } else {
                    Exists(y2, Box::new(b2))
                }
            }
        }
    }

    /// Body of a binder after renaming its variable to `x`.
    pub fn body_as(&self, x: &TyVar) -> Option<Ty> {
        match self {
            Forall(y, b) | Exists(y, b) => Some(if y == x {
                (**b).clone()
            } else {
                b.subst(y, &Var(x.clone()))
            }),
            _ => None,
        }
    }
}

/// Pick one binder for several bodies and rename each body to it.
pub fn common_binder(items: &[(&TyVar, &Ty)]) -> (TyVar, Vec<Ty>) {
    let first = items[0].0.clone();
    let clash = items
        .iter()
        .any(|(y, b)| **y != first && b.has_free(&first));
    let x = if clash {
        let id = 1 + items
            .iter()
            .map(|(y, b)| y.id.max(b.max_var_id()))
            .max()
            .unwrap_or(0);
        TyVar { name: first.name.clone(), id }
    } else {
        first
    };
    let bodies = items
        .iter()
        .map(|(y, b)| {
            if **y == x {
                (*b).clone()
            } else {
                b.subst(y, &Var(x.clone()))
            }
        })
        .collect();
    (x, bodies)
}

/// Type precision `g1 ⊑ g2`. Also used on evidence types, where
/// `a^E ⊑ a^E'` iff `E ⊑ E'`.
pub fn precision(g1: &Ty, g2: &Ty) -> bool {
    prec_go(&mut Vec::new(), g1, g2)
}

fn prec_go<'a>(env: &mut Vec<(&'a TyVar, &'a TyVar)>, a: &'a Ty, b: &'a Ty) -> bool {
    match (a, b) {
        (_, Unknown) => true,
        (Base(x), Base(y)) => x == y,
        (Name(x), Name(y)) => x == y,
        (Var(x), Var(y)) => vars_match(env, x, y),
        (Sealed(x, e1), Sealed(y, e2)) => x == y && prec_go(env, e1, e2),
        (Arrow(a1, b1), Arrow(a2, b2)) | (Pair(a1, b1), Pair(a2, b2)) => {
            prec_go(env, a1, a2) && prec_go(env, b1, b2)
        }
        (Forall(x, b1), Forall(y, b2)) | (Exists(x, b1), Exists(y, b2)) => {
            env.push((x, y));
            let r = prec_go(env, b1, b2);
            env.pop();
            r
        }
        _ => false,
    }
}

/// Strict precision `g1 ≤ g2`: binders, variables and names are never below `?`.
pub fn strict_type_precision(g1: &Ty, g2: &Ty) -> bool {
    strict_go(&mut Vec::new(), g1, g2)
}

fn strict_below_unknown(a: &Ty) -> bool {
    match a {
        Unknown | Base(_) => true,
        Arrow(x, y) | Pair(x, y) => strict_below_unknown(x) && strict_below_unknown(y),
        _ => false,
    }
}

fn strict_go<'a>(env: &mut Vec<(&'a TyVar, &'a TyVar)>, a: &'a Ty, b: &'a Ty) -> bool {
    match (a, b) {
        (_, Unknown) => strict_below_unknown(a),
        (Base(x), Base(y)) => x == y,
        (Name(x), Name(y)) => x == y,
        (Var(x), Var(y)) => vars_match(env, x, y),
        (Sealed(x, e1), Sealed(y, e2)) => x == y && strict_go(env, e1, e2),
        (Arrow(a1, b1), Arrow(a2, b2)) | (Pair(a1, b1), Pair(a2, b2)) => {
            strict_go(env, a1, a2) && strict_go(env, b1, b2)
        }
        (Forall(x, b1), Forall(y, b2)) | (Exists(x, b1), Exists(y, b2)) => {
            env.push((x, y));
            let r = strict_go(env, b1, b2);
            env.pop();
            r
        }
        _ => false,
    }
}

/// Precision meet, computed inductively.
pub fn meet(g1: &Ty, g2: &Ty) -> Option<Ty> {
    match (g1, g2) {
        (Unknown, g) | (g, Unknown) => Some(g.clone()),
        (Base(x), Base(y)) if x == y => Some(g1.clone()),
        (Name(x), Name(y)) if x == y => Some(g1.clone()),
        (Var(x), Var(y)) if x == y => Some(g1.clone()),
        (Sealed(x, e1), Sealed(y, e2)) if x == y => Some(Sealed(*x, Box::new(meet(e1, e2)?))),
        (Arrow(a1, b1), Arrow(a2, b2)) => Some(arrow(meet(a1, a2)?, meet(b1, b2)?)),
        (Pair(a1, b1), Pair(a2, b2)) => Some(pair(meet(a1, a2)?, meet(b1, b2)?)),
        (Forall(x, b1), Forall(y, b2)) => {
            let (z, bs) = common_binder(&[(x, b1), (y, b2)]);
            Some(Forall(z, Box::new(meet(&bs[0], &bs[1])?)))
        }
        (Exists(x, b1), Exists(y, b2)) => {
            let (z, bs) = common_binder(&[(x, b1), (y, b2)]);
            Some(Exists(z, Box::new(meet(&bs[0], &bs[1])?)))
        }
        _ => None,
    }
}

/// Least precise type both arguments refine, defined on consistent pairs.
/// Gives branches of a conditional a common type without losing seals.
pub fn join(g1: &Ty, g2: &Ty) -> Option<Ty> {
    match (g1, g2) {
        (Unknown, _) | (_, Unknown) => Some(Unknown),
        (Base(x), Base(y)) if x == y => Some(g1.clone()),
        (Name(x), Name(y)) if x == y => Some(g1.clone()),
        (Var(x), Var(y)) if x == y => Some(g1.clone()),
        (Sealed(x, e1), Sealed(y, e2)) if x == y => Some(Sealed(*x, Box::new(join(e1, e2)?))),
        (Arrow(a1, b1), Arrow(a2, b2)) => Some(arrow(join(a1, a2)?, join(b1, b2)?)),
        (Pair(a1, b1), Pair(a2, b2)) => Some(pair(join(a1, a2)?, join(b1, b2)?)),
        (Forall(x, b1), Forall(y, b2)) => {
            let (z, bs) = common_binder(&[(x, b1), (y, b2)]);
            Some(Forall(z, Box::new(join(&bs[0], &bs[1])?)))
        }
        (Exists(x, b1), Exists(y, b2)) => {
            let (z, bs) = common_binder(&[(x, b1), (y, b2)]);
            Some(Exists(z, Box::new(join(&bs[0], &bs[1])?)))
        }
        _ => None,
    }
}

/// Ordered type name store. Bindings are append-only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Store {
    entries: Vec<(TypeName, Ty)>,
}

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn get(&self, a: TypeName) -> Option<&Ty> {
        self.entries.iter().find(|(n, _)| *n == a).map(|(_, t)| t)
    }

    pub fn contains(&self, a: TypeName) -> bool {
        self.get(a).is_some()
    }

    pub fn next_name(&self) -> TypeName {
        TypeName(self.entries.iter().map(|(n, _)| n.0 + 1).max().unwrap_or(0))
    }

    /// Allocate a fresh name bound to `g`.
    pub fn fresh(&mut self, g: Ty) -> TypeName {
        let a = self.next_name();
        self.entries.push((a, g));
        a
    }

    pub fn insert(&mut self, a: TypeName, g: Ty) {
        assert!(!self.contains(a), "type name {a} already bound");
        self.entries.push((a, g));
    }

    pub fn iter(&self) -> impl Iterator<Item = &(TypeName, Ty)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for Store {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}:={t}")?;
        }
        f.write_str("}")
    }
}

/// `lift_Ξ`: replace every name with its sealed form carrying the store path.
///
/// Panics on an unbound name; source programs never mention names, so this
/// only fires on an evaluator bug.
pub fn lift(store: &Store, g: &Ty) -> Ty {
    match g {
        Name(a) => {
            let bound = store
                .get(*a)
                .unwrap_or_else(|| panic!("unbound type name {a}"));
            Sealed(*a, Box::new(lift(store, bound)))
        }
        Base(_) | Var(_) | Unknown | Sealed(..) => g.clone(),
        Arrow(a, b) => arrow(lift(store, a), lift(store, b)),
        Pair(a, b) => pair(lift(store, a), lift(store, b)),
        Forall(x, b) => Forall(x.clone(), Box::new(lift(store, b))),
        Exists(x, b) => Exists(x.clone(), Box::new(lift(store, b))),
    }
}

pub fn unlift(e: &Ty) -> Ty {
    match e {
        Sealed(a, _) => Name(*a),
        Base(_) | Var(_) | Unknown | Name(_) => e.clone(),
        Arrow(a, b) => arrow(unlift(a), unlift(b)),
        Pair(a, b) => pair(unlift(a), unlift(b)),
        Forall(x, b) => Forall(x.clone(), Box::new(unlift(b))),
        Exists(x, b) => Exists(x.clone(), Box::new(unlift(b))),
    }
}

pub fn subst_type(g: &Ty, x: &TyVar, replacement: &Ty) -> Ty {
    g.subst(x, replacement)
}

/// Consistent partial type functions.
pub fn dom(g: &Ty) -> Option<Ty> {
    match g {
        Arrow(a, _) => Some((**a).clone()),
        Unknown => Some(Unknown),
        _ => None,
    }
}

pub fn cod(g: &Ty) -> Option<Ty> {
    match g {
        Arrow(_, b) => Some((**b).clone()),
        Unknown => Some(Unknown),
        _ => None,
    }
}

pub fn inst(g: &Ty, arg: &Ty) -> Option<Ty> {
    match g {
        Forall(x, b) => Some(b.subst(x, arg)),
        Unknown => Some(Unknown),
        _ => None,
    }
}

pub fn proj(i: u8, g: &Ty) -> Option<Ty> {
    match g {
        Pair(a, b) => Some(if i == 1 { (**a).clone() } else { (**b).clone() }),
        Unknown => Some(Unknown),
        _ => None,
    }
}

/// Existential schema; for `?` the result is `?`.
pub fn schm_e(g: &Ty) -> Option<Ty> {
    match g {
        Exists(_, b) => Some((**b).clone()),
        Unknown => Some(Unknown),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartialFn {
    Dom,
    Cod,
    Inst,
    Proj1,
    Proj2,
    SchmE,
}

pub fn partial_type_fn(kind: PartialFn, g: &Ty, arg: Option<&Ty>) -> Option<Ty> {
    match kind {
        PartialFn::Dom => dom(g),
        PartialFn::Cod => cod(g),
        PartialFn::Inst => inst(g, arg?),
        PartialFn::Proj1 => proj(1, g),
        PartialFn::Proj2 => proj(2, g),
        PartialFn::SchmE => schm_e(g),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchShape {
    Function,
    Forall,
    Pair,
    Exists,
}

/// Type matching `g ⊳ g'`.
pub fn matching(g: &Ty, shape: MatchShape) -> Option<Ty> {
    match (g, shape) {
        (Unknown, MatchShape::Function) => Some(arrow(Unknown, Unknown)),
        (Unknown, MatchShape::Forall) => Some(forall("X", Unknown)),
        (Unknown, MatchShape::Pair) => Some(pair(Unknown, Unknown)),
        (Unknown, MatchShape::Exists) => Some(exists("X", Unknown)),
        (Arrow(..), MatchShape::Function)
        | (Forall(..), MatchShape::Forall)
        | (Pair(..), MatchShape::Pair)
        | (Exists(..), MatchShape::Exists) => Some(g.clone()),
        _ => None,
    }
}

/// Whether `g1 ⊳ g2` holds for some shape.
pub fn matches_to(g1: &Ty, g2: &Ty) -> bool {
    [
        MatchShape::Function,
        MatchShape::Forall,
        MatchShape::Pair,
        MatchShape::Exists,
    ]
    .iter()
    .any(|s| matching(g1, *s).is_some_and(|m| m == *g2))
}

/// Evidence: a pair of evidence types.
#[derive(Clone, Debug, PartialEq)]
pub struct Evidence {
    pub left: Ty,
    pub right: Ty,
}

impl Evidence {
    pub fn new(left: Ty, right: Ty) -> Self {
        Evidence { left, right }
    }

    /// `ε_E = ⟨E, E⟩`.
    pub fn refl(e: Ty) -> Self {
        Evidence { left: e.clone(), right: e }
    }

    pub fn unknown() -> Self {
        Evidence::refl(Unknown)
    }

    pub fn is_static(&self) -> bool {
        self.left.is_static() && self.right.is_static() && !self.left.has_names() && !self.right.has_names()
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.left, self.right)
    }
}

/// Evidence precision, component-wise.
pub fn evidence_precision(e1: &Evidence, e2: &Evidence) -> bool {
    precision(&e1.left, &e2.left) && precision(&e1.right, &e2.right)
}

/// Strict evidence precision, component-wise.
pub fn evidence_strict(e1: &Evidence, e2: &Evidence) -> bool {
    strict_type_precision(&e1.left, &e2.left) && strict_type_precision(&e1.right, &e2.right)
}

// Printing. Levels: 0 binders, 1 arrows, 2 pairs, 3 atoms.
fn write_ty(f: &mut fmt::Formatter<'_>, t: &Ty, level: u8) -> fmt::Result {
    match t {
        Base(b) => write!(f, "{b}"),
        Unknown => f.write_str("?"),
        Var(x) => write!(f, "{x}"),
        Name(a) => write!(f, "{a}"),
        Sealed(a, e) => {
            write!(f, "{a}^")?;
            write_ty(f, e, 3)
        }
        Forall(x, b) | Exists(x, b) => {
            let kw = if matches!(t, Forall(..)) { "forall" } else { "exists" };
            if level > 0 {
                f.write_str("(")?;
            }
            write!(f, "{kw} {x}.")?;
            write_ty(f, b, 0)?;
            if level > 0 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Arrow(a, b) => {
            if level > 1 {
                f.write_str("(")?;
            }
            write_ty(f, a, 2)?;
            f.write_str("->")?;
            write_ty(f, b, 0)?;
            if level > 1 {
                f.write_str(")")?;
            }
            Ok(())
        }
        Pair(a, b) => {
            if level > 2 {
                f.write_str("(")?;
            }
            write_ty(f, a, 3)?;
            f.write_str("*")?;
            write_ty(f, b, 2)?;
            if level > 2 {
                f.write_str(")")?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ty(f, self, 0)
    }
}

/// Print at a level that is safe inside larger syntax (used by term printers).
pub struct TyAtom<'a>(pub &'a Ty);

impl fmt::Display for TyAtom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_ty(f, self.0, 3)
    }
}
