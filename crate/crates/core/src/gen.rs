//! Random generators for types, terms, evidence chains and λseal programs.
//! Shared by the property tests, the acceptance suite and the benchmarks.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::seal::SealTerm;
use crate::statics::{typecheck_gsf, TypeEnv};
use crate::syntax::{build, Op, Term, TermKind};
use crate::types::{lift, Base, Evidence, Store, Ty, TyVar, TypeName};

pub struct Gen {
    rng: StdRng,
    next: usize,
}

#[derive(Default)]
struct Ctx {
    vars: Vec<(String, Ty)>,
    tyvars: Vec<TyVar>,
}

/// Value shapes for λseal programs, used to keep most generated programs
/// free of type errors.
#[derive(Clone, Debug, PartialEq)]
enum Kind {
    Int,
    Bool,
    Pair(Box<Kind>, Box<Kind>),
    Fun(Box<Kind>, Box<Kind>),
    Sealed(Box<Kind>),
}

fn bx<T>(t: T) -> Box<T> {
    Box::new(t)
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen { rng: StdRng::seed_from_u64(seed), next: 0 }
    }

    pub fn rng(&mut self) -> &mut StdRng {
        &mut self.rng
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn fresh(&mut self, prefix: &str) -> String {
        self.next += 1;
        format!("{prefix}{}", self.next)
    }

    fn fresh_tyvar(&mut self) -> TyVar {
        TyVar::new(self.fresh("X"))
    }

    fn base(&mut self) -> Ty {
        if self.chance(0.6) {
            Ty::Base(Base::Int)
        } else {
            Ty::Base(Base::Bool)
        }
    }

    /// A static type of at most the given depth, using type variables in scope.
    pub fn static_type(&mut self, depth: usize, scope: &[TyVar]) -> Ty {
        if depth <= 1 || self.chance(0.35) {
            if !scope.is_empty() && self.chance(0.3) {
                return Ty::Var(scope.choose(&mut self.rng).unwrap().clone());
            }
            return self.base();
        }
        match self.rng.gen_range(0..6) {
            0..=2 => Ty::Arrow(bx(self.static_type(depth - 1, scope)), bx(self.static_type(depth - 1, scope))),
            3 => Ty::Pair(bx(self.static_type(depth - 1, scope)), bx(self.static_type(depth - 1, scope))),
            k => {
                let x = self.fresh_tyvar();
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                let body = bx(self.static_type(depth - 1, &inner));
                if k == 4 {
                    Ty::Forall(x, body)
                } else {
                    Ty::Exists(x, body)
                }
            }
        }
    }

    pub fn gradual_type(&mut self, depth: usize, scope: &[TyVar]) -> Ty {
        let t = self.static_type(depth, scope);
        self.loosen(&t, 0.3)
    }

    /// A type at least as imprecise as `g`: each subtree becomes `?` with
    /// probability `p`.
    pub fn loosen(&mut self, g: &Ty, p: f64) -> Ty {
        if self.chance(p) {
            return Ty::Unknown;
        }
        match g {
            Ty::Arrow(a, b) => Ty::Arrow(bx(self.loosen(a, p)), bx(self.loosen(b, p))),
            Ty::Pair(a, b) => Ty::Pair(bx(self.loosen(a, p)), bx(self.loosen(b, p))),
            Ty::Forall(x, b) => Ty::Forall(x.clone(), bx(self.loosen(b, p))),
            Ty::Exists(x, b) => Ty::Exists(x.clone(), bx(self.loosen(b, p))),
            Ty::Sealed(a, e) => Ty::Sealed(*a, bx(self.loosen(e, p))),
            _ => g.clone(),
        }
    }

    /// Like [`Gen::loosen`], but only where the strict order allows `?`:
    /// never over quantifiers, variables or names.
    pub fn loosen_strict(&mut self, g: &Ty, p: f64) -> Ty {
        fn below_unknown(g: &Ty) -> bool {
            match g {
                Ty::Unknown | Ty::Base(_) => true,
                Ty::Arrow(a, b) | Ty::Pair(a, b) => below_unknown(a) && below_unknown(b),
                _ => false,
            }
        }
        if below_unknown(g) && self.chance(p) {
            return Ty::Unknown;
        }
        match g {
            Ty::Arrow(a, b) => Ty::Arrow(bx(self.loosen_strict(a, p)), bx(self.loosen_strict(b, p))),
            Ty::Pair(a, b) => Ty::Pair(bx(self.loosen_strict(a, p)), bx(self.loosen_strict(b, p))),
            Ty::Forall(x, b) => Ty::Forall(x.clone(), bx(self.loosen_strict(b, p))),
            Ty::Exists(x, b) => Ty::Exists(x.clone(), bx(self.loosen_strict(b, p))),
            Ty::Sealed(a, e) => Ty::Sealed(*a, bx(self.loosen_strict(e, p))),
            _ => g.clone(),
        }
    }

    // ---- terms ----

    /// A closed, well-typed static term of type `ty`, or `None` when the
    /// generator painted itself into a corner (e.g. an uninhabited type).
    pub fn static_term(&mut self, ty: &Ty, fuel: usize) -> Option<Term> {
        self.term(&mut Ctx::default(), ty, fuel)
    }

    /// A closed, well-typed static program.
    pub fn static_program(&mut self, fuel: usize) -> Term {
        loop {
            let ty = self.static_type(3, &[]);
            if let Some(t) = self.static_term(&ty, fuel) {
                return t;
            }
        }
    }

    /// A closed, well-typed gradual program: a static program with loosened
    /// annotations and extra ascriptions through `?`.
    pub fn gradual_program(&mut self, fuel: usize) -> Term {
        loop {
            let t = self.static_program(fuel);
            let t = self.loosen_term(&t, 0.3);
            let t = self.add_ascriptions(&t, 0.12);
            if typecheck_gsf(&TypeEnv::new(), &t).is_ok() {
                return t;
            }
        }
    }

    fn term(&mut self, cx: &mut Ctx, ty: &Ty, fuel: usize) -> Option<Term> {
        let candidates: Vec<String> = cx.vars.iter().filter(|(_, g)| g == ty).map(|(x, _)| x.clone()).collect();
        if !candidates.is_empty() && (fuel == 0 || self.chance(0.3)) {
            return Some(build::var(candidates.choose(&mut self.rng).unwrap()));
        }
        if fuel > 0 && self.chance(0.45) {
            if let Some(t) = self.elim(cx, ty, fuel - 1) {
                return Some(t);
            }
        }
        self.intro(cx, ty, fuel.saturating_sub(1))
    }

    fn intro(&mut self, cx: &mut Ctx, ty: &Ty, fuel: usize) -> Option<Term> {
        Some(match ty {
            Ty::Base(Base::Int) => build::int(self.rng.gen_range(-3..10)),
            Ty::Base(Base::Bool) => build::bool_(self.chance(0.5)),
            Ty::Base(Base::Unit) => build::unit(),
            Ty::Arrow(a, b) => {
                let x = self.fresh("x");
                cx.vars.push((x.clone(), (**a).clone()));
                let body = self.term(cx, b, fuel);
                cx.vars.pop();
                build::lam(&x, (**a).clone(), body?)
            }
            Ty::Pair(a, b) => build::pair(self.term(cx, a, fuel)?, self.term(cx, b, fuel)?),
            Ty::Forall(x, b) => {
                cx.tyvars.push(x.clone());
                let body = self.term(cx, b, fuel);
                cx.tyvars.pop();
                TermKind::TyLam(x.clone(), bx(body?)).into()
            }
            Ty::Exists(x, b) => {
                let w = self.static_type(2, &cx.tyvars);
                let t = self.term(cx, &b.subst(x, &w), fuel)?;
                build::pack(w, t, ty.clone())
            }
            _ => return None,
        })
    }

    fn elim(&mut self, cx: &mut Ctx, ty: &Ty, fuel: usize) -> Option<Term> {
        let scope = cx.tyvars.clone();
        match self.rng.gen_range(0..7) {
            0 => {
                let a = self.static_type(2, &scope);
                let f = self.term(cx, &Ty::Arrow(bx(a.clone()), bx(ty.clone())), fuel)?;
                Some(build::app(f, self.term(cx, &a, fuel)?))
            }
            1 => {
                let a = self.static_type(2, &scope);
                let x = self.fresh("x");
                let t = self.term(cx, &a, fuel)?;
                cx.vars.push((x.clone(), a.clone()));
                let body = self.term(cx, ty, fuel);
                cx.vars.pop();
                let ann = self.chance(0.5).then_some(a);
                Some(build::let_(&x, ann, t, body?))
            }
            2 => Some(build::if_(
                self.term(cx, &Ty::Base(Base::Bool), fuel)?,
                self.term(cx, ty, fuel)?,
                self.term(cx, ty, fuel)?,
            )),
            3 => {
                let other = self.static_type(2, &scope);
                if self.chance(0.5) {
                    Some(build::proj(1, self.term(cx, &Ty::Pair(bx(ty.clone()), bx(other)), fuel)?))
                } else {
                    Some(build::proj(2, self.term(cx, &Ty::Pair(bx(other), bx(ty.clone())), fuel)?))
                }
            }
            4 => {
                // abstract some occurrences of the target type and instantiate back
                let x = self.fresh_tyvar();
                let s = if self.chance(0.5) { Ty::Var(x.clone()) } else { self.abstract_in(ty, ty, &x) };
                let f = self.term(cx, &Ty::Forall(x, bx(s)), fuel)?;
                Some(build::tyapp(f, ty.clone()))
            }
            5 => {
                let x = self.fresh_tyvar();
                let mut inner = scope.clone();
                inner.push(x.clone());
                let s = self.static_type(2, &inner);
                let pk = self.term(cx, &Ty::Exists(x.clone(), bx(s.clone())), fuel)?;
                let y = self.fresh("y");
                cx.tyvars.push(x.clone());
                cx.vars.push((y.clone(), s));
                let body = self.term(cx, ty, fuel);
                cx.vars.pop();
                cx.tyvars.pop();
                Some(TermKind::Unpack(x, y, bx(pk), bx(body?)).into())
            }
            _ => {
                let ops: &[Op] = match ty {
                    Ty::Base(Base::Int) => &[Op::Add, Op::Sub, Op::Mul],
                    Ty::Base(Base::Bool) => &[Op::Lt, Op::Eq, Op::Not, Op::And, Op::Or],
                    _ => return None,
                };
                let op = *ops.choose(&mut self.rng).unwrap();
                let arg = Ty::Base(op.signature().0);
                let args = (0..op.arity()).map(|_| self.term(cx, &arg, fuel)).collect::<Option<Vec<_>>>()?;
                Some(build::op(op, args))
            }
        }
    }

    /// Replace some occurrences of `w` inside `g` by `x`.
    fn abstract_in(&mut self, g: &Ty, w: &Ty, x: &TyVar) -> Ty {
        if g == w && self.chance(0.6) {
            return Ty::Var(x.clone());
        }
        match g {
            Ty::Arrow(a, b) => Ty::Arrow(bx(self.abstract_in(a, w, x)), bx(self.abstract_in(b, w, x))),
            Ty::Pair(a, b) => Ty::Pair(bx(self.abstract_in(a, w, x)), bx(self.abstract_in(b, w, x))),
            _ => g.clone(),
        }
    }

    /// Loosen every annotation of `t` independently with probability `p`.
    pub fn loosen_term(&mut self, t: &Term, p: f64) -> Term {
        let mut ann = |g: &Ty, s: &mut Gen| if s.chance(p) { s.loosen(g, 0.5) } else { g.clone() };
        self.map_annotations(t, &mut ann)
    }

    /// A ⊑-mutation: loosen annotations, at least one of them if any exist.
    pub fn precision_mutation(&mut self, t: &Term) -> Term {
        for _ in 0..8 {
            let m = self.loosen_term(t, 0.4);
            if m != *t {
                return m;
            }
        }
        self.loosen_term(t, 0.4)
    }

    fn map_annotations(&mut self, t: &Term, f: &mut dyn FnMut(&Ty, &mut Gen) -> Ty) -> Term {
        use TermKind::*;
        let kind = match &t.kind {
            Const(_) | Var(_) => t.kind.clone(),
            Lam(x, g, b) => Lam(x.clone(), f(g, self), bx(self.map_annotations(b, f))),
            TyLam(x, b) => TyLam(x.clone(), bx(self.map_annotations(b, f))),
            Pair(a, b) => Pair(bx(self.map_annotations(a, f)), bx(self.map_annotations(b, f))),
            Asc(a, g) => Asc(bx(self.map_annotations(a, f)), f(g, self)),
            Op(o, args) => Op(*o, args.iter().map(|a| self.map_annotations(a, f)).collect()),
            App(a, b) => App(bx(self.map_annotations(a, f)), bx(self.map_annotations(b, f))),
            TyApp(a, g) => TyApp(bx(self.map_annotations(a, f)), f(g, self)),
            Proj(i, a) => Proj(*i, bx(self.map_annotations(a, f))),
            If(c, a, b) => If(
                bx(self.map_annotations(c, f)),
                bx(self.map_annotations(a, f)),
                bx(self.map_annotations(b, f)),
            ),
            Let(x, g, a, b) => Let(
                x.clone(),
                g.as_ref().map(|g| f(g, self)),
                bx(self.map_annotations(a, f)),
                bx(self.map_annotations(b, f)),
            ),
            Pack(w, a, g) => {
                // the annotation of a package stays existential
                let g = match g {
                    Ty::Exists(x, b) => Ty::Exists(x.clone(), bx(f(b, self))),
                    g => f(g, self),
                };
                Pack(f(w, self), bx(self.map_annotations(a, f)), g)
            }
            Unpack(x, y, a, b) => Unpack(x.clone(), y.clone(), bx(self.map_annotations(a, f)), bx(self.map_annotations(b, f))),
        };
        kind.into()
    }

    /// Wrap random subterms in `:: ?`, and occasionally cast them back out
    /// to a random type.
    pub fn add_ascriptions(&mut self, t: &Term, p: f64) -> Term {
        use TermKind::*;
        let go = |s: &mut Gen, a: &Term| s.add_ascriptions(a, p);
        let kind = match &t.kind {
            Const(_) | Var(_) => t.kind.clone(),
            Lam(x, g, b) => Lam(x.clone(), g.clone(), bx(go(self, b))),
            TyLam(x, b) => TyLam(x.clone(), bx(go(self, b))),
            Pair(a, b) => Pair(bx(go(self, a)), bx(go(self, b))),
            Asc(a, g) => Asc(bx(go(self, a)), g.clone()),
            Op(o, args) => Op(*o, args.iter().map(|a| go(self, a)).collect()),
            App(a, b) => App(bx(go(self, a)), bx(go(self, b))),
            TyApp(a, g) => TyApp(bx(go(self, a)), g.clone()),
            Proj(i, a) => Proj(*i, bx(go(self, a))),
            If(c, a, b) => If(bx(go(self, c)), bx(go(self, a)), bx(go(self, b))),
            Let(x, g, a, b) => Let(x.clone(), g.clone(), bx(go(self, a)), bx(go(self, b))),
            Pack(w, a, g) => Pack(w.clone(), bx(go(self, a)), g.clone()),
            Unpack(x, y, a, b) => Unpack(x.clone(), y.clone(), bx(go(self, a)), bx(go(self, b))),
        };
        let t: Term = kind.into();
        if !self.chance(p) {
            return t;
        }
        let up = build::asc(t, Ty::Unknown);
        if self.chance(0.3) {
            let g = self.gradual_type(2, &[]);
            build::asc(up, g)
        } else {
            up
        }
    }

    // ---- evidence ----

    /// The store used for generated evidence.
    pub fn evidence_store() -> Store {
        let mut s = Store::new();
        s.insert(TypeName(1), Ty::Base(Base::Int));
        s.insert(TypeName(2), Ty::Arrow(bx(Ty::Base(Base::Bool)), bx(Ty::Base(Base::Int))));
        s.insert(TypeName(3), Ty::Unknown);
        s
    }

    /// A precise evidence type over the given store: no `?` outside sealed
    /// store bindings.
    pub fn evidence_type(&mut self, store: &Store, depth: usize, scope: &[TyVar]) -> Ty {
        if depth <= 1 || self.chance(0.3) {
            let r = self.rng.gen_range(0..10);
            if r < 3 && !store.is_empty() {
                let (a, _) = store.iter().nth(self.rng.gen_range(0..store.len())).unwrap().clone();
                return lift(store, &Ty::Name(a));
            }
            if r < 5 && !scope.is_empty() {
                return Ty::Var(scope.choose(&mut self.rng).unwrap().clone());
            }
            return self.base();
        }
        match self.rng.gen_range(0..5) {
            0 | 1 => Ty::Arrow(
                bx(self.evidence_type(store, depth - 1, scope)),
                bx(self.evidence_type(store, depth - 1, scope)),
            ),
            2 => Ty::Pair(
                bx(self.evidence_type(store, depth - 1, scope)),
                bx(self.evidence_type(store, depth - 1, scope)),
            ),
            k => {
                let x = self.fresh_tyvar();
                let mut inner = scope.to_vec();
                inner.push(x.clone());
                let body = bx(self.evidence_type(store, depth - 1, &inner));
                if k == 3 {
                    Ty::Forall(x, body)
                } else {
                    Ty::Exists(x, body)
                }
            }
        }
    }

    /// One component of an evidence justified by the precise type `t`:
    /// subtrees may become `?` and seals may be dropped.
    pub fn evidence_view(&mut self, t: &Ty, p: f64) -> Ty {
        if self.chance(p) {
            return Ty::Unknown;
        }
        match t {
            Ty::Sealed(a, e) => {
                if self.chance(0.5) {
                    Ty::Sealed(*a, bx(self.evidence_view(e, p)))
                } else {
                    self.evidence_view(e, p)
                }
            }
            Ty::Arrow(a, b) => Ty::Arrow(bx(self.evidence_view(a, p)), bx(self.evidence_view(b, p))),
            Ty::Pair(a, b) => Ty::Pair(bx(self.evidence_view(a, p)), bx(self.evidence_view(b, p))),
            Ty::Forall(x, b) => Ty::Forall(x.clone(), bx(self.evidence_view(b, p))),
            Ty::Exists(x, b) => Ty::Exists(x.clone(), bx(self.evidence_view(b, p))),
            _ => t.clone(),
        }
    }

    /// An evidence whose two components are views of one precise type.
    pub fn evidence_of(&mut self, t: &Ty) -> Evidence {
        let p = *[0.0, 0.1, 0.25].choose(&mut self.rng).unwrap();
        Evidence::new(self.evidence_view(t, p), self.evidence_view(t, p))
    }

    /// `n` evidences for a chain of consistency judgments. Most share one
    /// underlying precise type; some are independent, so that a middle
    /// judgment only holds at `?` and composition may fail.
    pub fn evidence_chain(&mut self, store: &Store, n: usize) -> Vec<Evidence> {
        let depth = self.rng.gen_range(1..=4);
        let t = self.evidence_type(store, depth, &[]);
        (0..n)
            .map(|_| {
                if self.chance(0.2) {
                    let other = self.evidence_type(store, depth, &[]);
                    self.evidence_of(&other)
                } else {
                    self.evidence_of(&t)
                }
            })
            .collect()
    }

    /// A strictly less precise evidence.
    pub fn loosen_evidence_strict(&mut self, e: &Evidence) -> Evidence {
        Evidence::new(self.loosen_strict(&e.left, 0.3), self.loosen_strict(&e.right, 0.3))
    }

    // ---- λseal and λdyn ----

    /// A closed λseal program where seals only come from `nu` binders.
    pub fn seal_term(&mut self, fuel: usize) -> SealTerm {
        self.untyped(fuel, true)
    }

    /// A closed λdyn program (no sealing forms).
    pub fn dyn_term(&mut self, fuel: usize) -> SealTerm {
        self.untyped(fuel, false)
    }

    /// A closed λdyn program that evaluates to a function, if anything.
    pub fn dyn_function(&mut self, fuel: usize) -> SealTerm {
        let k = Kind::Fun(bx(self.kind(1, false)), bx(self.kind(1, false)));
        self.sterm(&mut Vec::new(), &mut Vec::new(), &k, fuel, false)
    }

    fn untyped(&mut self, fuel: usize, seals: bool) -> SealTerm {
        let k = self.kind(2, seals);
        let mut vars = Vec::new();
        let mut keys = Vec::new();
        self.sterm(&mut vars, &mut keys, &k, fuel, seals)
    }

    fn kind(&mut self, depth: usize, seals: bool) -> Kind {
        if depth == 0 || self.chance(0.5) {
            return if self.chance(0.6) { Kind::Int } else { Kind::Bool };
        }
        match self.rng.gen_range(0..4) {
            0 => Kind::Pair(bx(self.kind(depth - 1, seals)), bx(self.kind(depth - 1, seals))),
            1 | 2 => Kind::Fun(bx(self.kind(depth - 1, seals)), bx(self.kind(depth - 1, seals))),
            _ if seals => Kind::Sealed(bx(self.kind(depth - 1, seals))),
            _ => Kind::Int,
        }
    }

    fn sterm(
        &mut self,
        vars: &mut Vec<(String, Kind)>,
        keys: &mut Vec<String>,
        k: &Kind,
        fuel: usize,
        seals: bool,
    ) -> SealTerm {
        use crate::seal::sbuild as s;
        // an occasional ill-shaped term keeps error paths exercised
        if self.chance(0.02) {
            let wrong = if *k == Kind::Int { Kind::Bool } else { Kind::Int };
            return self.sterm(vars, keys, &wrong, fuel.saturating_sub(1), seals);
        }
        let here: Vec<String> = vars.iter().filter(|(_, vk)| vk == k).map(|(x, _)| x.clone()).collect();
        if !here.is_empty() && (fuel == 0 || self.chance(0.3)) {
            return s::var(here.choose(&mut self.rng).unwrap());
        }
        let f = fuel.saturating_sub(1);
        if fuel > 0 && self.chance(0.5) {
            let choice = self.rng.gen_range(0..if seals { 8 } else { 5 });
            match choice {
                0 => {
                    let a = self.kind(1, seals);
                    let fun = self.sterm(vars, keys, &Kind::Fun(bx(a.clone()), bx(k.clone())), f, seals);
                    let arg = self.sterm(vars, keys, &a, f, seals);
                    return s::app(fun, arg);
                }
                1 => {
                    let b = self.kind(1, seals);
                    return if self.chance(0.5) {
                        s::proj(1, self.sterm(vars, keys, &Kind::Pair(bx(k.clone()), bx(b)), f, seals))
                    } else {
                        s::proj(2, self.sterm(vars, keys, &Kind::Pair(bx(b), bx(k.clone())), f, seals))
                    };
                }
                2 => {
                    let c = self.sterm(vars, keys, &Kind::Bool, f, seals);
                    let a = self.sterm(vars, keys, k, f, seals);
                    let b = self.sterm(vars, keys, k, f, seals);
                    return s::if_(c, a, b);
                }
                3 => {
                    let a = self.kind(1, seals);
                    let x = self.fresh("x");
                    let t = self.sterm(vars, keys, &a, f, seals);
                    vars.push((x.clone(), a));
                    let body = self.sterm(vars, keys, k, f, seals);
                    vars.pop();
                    return s::app(s::lam(&x, body), t);
                }
                4 if matches!(k, Kind::Int | Kind::Bool) => {
                    let ops: &[Op] = if *k == Kind::Int {
                        &[Op::Add, Op::Sub, Op::Mul]
                    } else {
                        &[Op::Lt, Op::Eq, Op::Not, Op::And, Op::Or]
                    };
                    let op = *ops.choose(&mut self.rng).unwrap();
                    let ak = if op.signature().0 == Base::Int { Kind::Int } else { Kind::Bool };
                    let args = (0..op.arity()).map(|_| self.sterm(vars, keys, &ak, f, seals)).collect();
                    return s::op(op, args);
                }
                5 | 6 => {
                    let key = self.fresh("k");
                    keys.push(key.clone());
                    let body = self.sterm(vars, keys, k, f, seals);
                    keys.pop();
                    return s::nu(&key, body);
                }
                7 if !keys.is_empty() => {
                    let a = self.kind(1, seals);
                    let key = keys.choose(&mut self.rng).unwrap().clone();
                    let payload = self.sterm(vars, keys, &Kind::Sealed(bx(a.clone())), f, seals);
                    let x = self.fresh("x");
                    vars.push((x.clone(), a));
                    let body = self.sterm(vars, keys, k, f, seals);
                    vars.pop();
                    return s::unseal(&x, s::var(&key), payload, body);
                }
                _ => {}
            }
        }
        match k {
            Kind::Int => s::int(self.rng.gen_range(-3..10)),
            Kind::Bool => s::bool_(self.chance(0.5)),
            Kind::Pair(a, b) => {
                let l = self.sterm(vars, keys, a, f, seals);
                let r = self.sterm(vars, keys, b, f, seals);
                s::pair(l, r)
            }
            Kind::Fun(a, b) => {
                let x = self.fresh("x");
                vars.push((x.clone(), (**a).clone()));
                let body = self.sterm(vars, keys, b, f, seals);
                vars.pop();
                s::lam(&x, body)
            }
            Kind::Sealed(a) => {
                let v = self.sterm(vars, keys, a, f, seals);
                if keys.is_empty() || self.chance(0.2) {
                    let key = self.fresh("k");
                    s::nu(&key, s::seal(v, s::var(&key)))
                } else {
                    let key = keys.choose(&mut self.rng).unwrap().clone();
                    s::seal(v, s::var(&key))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statics::typecheck_sf;

    #[test]
    fn static_programs_typecheck() {
        let mut g = Gen::new(7);
        for _ in 0..200 {
            let t = g.static_program(4);
            assert!(typecheck_sf(&TypeEnv::new(), &t).is_ok(), "{t}");
        }
    }

    #[test]
    fn gradual_programs_typecheck() {
        let mut g = Gen::new(8);
        for _ in 0..100 {
            let t = g.gradual_program(4);
            assert!(typecheck_gsf(&TypeEnv::new(), &t).is_ok(), "{t}");
        }
    }

    #[test]
    fn seal_programs_use_keys_as_keys() {
        use crate::seal::{eval_seal, SealOutcome};
        let mut g = Gen::new(9);
        let mut values = 0;
        for _ in 0..300 {
            let t = g.seal_term(4);
            match eval_seal(&t, 10_000) {
                SealOutcome::SealTypeError(e) => panic!("{t}: {e}"),
                SealOutcome::Value(..) => values += 1,
                _ => {}
            }
        }
        assert!(values > 150, "{values}");
    }
}
