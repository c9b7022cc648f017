//! Small-step evaluation of evidence-term configurations.

use crate::elaborate::{elaborate_with, Mode};
use crate::evidence::{
    dip, ev_inst, ev_inst_exists, ev_invert, ev_pair, out_evidence, record_trans, take_trans_calls, trans,
    Inversion, TransCall,
};
use crate::precision::config_precision;
use crate::statics::{typecheck_eps, TypeEnv, TypeError};
use crate::syntax::{self, Const, Term, TermEps};
use crate::types::{lift, Evidence, Store, Ty, TyVar};
use std::fmt;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub store: Store,
    pub term: TermEps,
}

impl Configuration {
    pub fn new(term: TermEps) -> Self {
        Configuration { store: Store::new(), term }
    }
}

#[derive(Clone, Debug)]
pub struct EvalOptions {
    pub max_steps: usize,
    pub dip: bool,
    pub trace: bool,
    pub debug_typecheck: bool,
    /// Record every consistent transitivity call in the trace.
    pub trace_trans: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions { max_steps: 100_000, dip: false, trace: false, debug_typecheck: false, trace_trans: false }
    }
}

impl EvalOptions {
    pub fn with_steps(max_steps: usize) -> Self {
        EvalOptions { max_steps, ..Self::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Value(Store, TermEps),
    RuntimeError { step: usize, detail: String },
    Timeout(usize),
}

impl Outcome {
    pub fn is_value(&self) -> bool {
        matches!(self, Outcome::Value(..))
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Outcome::RuntimeError { .. })
    }

    /// The raw constant of a base-typed value, if any.
    pub fn constant(&self) -> Option<Const> {
        match self {
            Outcome::Value(_, TermEps::Asc(_, u, _)) => match **u {
                TermEps::Const(c) => Some(c),
                _ => None,
            },
            _ => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(_, v) => write!(f, "{v}"),
            Outcome::RuntimeError { step, detail } => write!(f, "runtime error at step {step}: {detail}"),
            Outcome::Timeout(n) => write!(f, "timeout after {n} steps"),
        }
    }
}

/// Failures that are not part of the language semantics.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("internal error at step {step}: {detail}")]
    Internal { step: usize, detail: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StepResult {
    Stepped(Configuration, &'static str),
    RuntimeError(String),
    AlreadyValue,
}

enum Red {
    /// Reduced in place; the rule that fired.
    Step(&'static str),
    Error(String),
    Value,
}

enum Contracted {
    Step(TermEps, &'static str),
    Error(String),
}

fn internal(detail: impl Into<String>) -> String {
    detail.into()
}

/// One reduction step. `Err` means the term is stuck, which is a bug on
/// well-typed input.
pub fn step(c: &Configuration, opts: &EvalOptions) -> Result<StepResult, String> {
    let mut next = c.clone();
    Ok(match step_in_place(&mut next, opts)? {
        Red::Step(rule) => StepResult::Stepped(next, rule),
        Red::Error(e) => StepResult::RuntimeError(e),
        Red::Value => StepResult::AlreadyValue,
    })
}

/// Like [`step`], but rewrites only the redex of `c`.
fn step_in_place(c: &mut Configuration, opts: &EvalOptions) -> Result<Red, String> {
    reduce(&mut c.store, &mut c.term, opts)
}

fn raw_const(v: &TermEps) -> Option<Const> {
    match v {
        TermEps::Asc(_, u, _) => match **u {
            TermEps::Const(c) => Some(c),
            _ => None,
        },
        _ => None,
    }
}

fn reduce(store: &mut Store, t: &mut TermEps, opts: &EvalOptions) -> Result<Red, String> {
    use TermEps::*;
    macro_rules! frame {
        ($sub:expr) => {
            match reduce(store, $sub, opts)? {
                Red::Value => {}
                r => return Ok(r),
            }
        };
    }
    match t {
        Asc(_, inner, _) => {
            if inner.is_raw() {
                return Ok(Red::Value);
            }
            if !inner.is_value() {
                if let Pack(_, body, _) = &mut **inner {
                    frame!(body);
                    return Err(internal("package body did not reduce"));
                }
                frame!(inner);
                return Err(internal(format!("stuck ascription {t}")));
            }
        }
        Const(_) | Lam(..) | TyLam(..) | Pack(..) => return Err(internal(format!("bare raw value {t}"))),
        Var(x) => return Err(internal(format!("free variable {x}"))),
        Op(_, args) => {
            for a in args.iter_mut() {
                frame!(a);
            }
        }
        App(f, a) | Pair(f, a) => {
            frame!(f);
            frame!(a);
        }
        TyApp(f, _) | Proj(_, f) | If(f, _, _) | Unpack(_, _, f, _) => frame!(f),
    }
    Ok(match contract(store, t, opts)? {
        Contracted::Step(new, rule) => {
            *t = new;
            Red::Step(rule)
        }
        Contracted::Error(e) => Red::Error(e),
    })
}

/// Contract the redex `t`, whose subterms in evaluation position are values.
fn contract(store: &mut Store, t: &TermEps, opts: &EvalOptions) -> Result<Contracted, String> {
    use TermEps::*;
    match t {
        Asc(e2, inner, g2) => {
            if inner.is_raw() {
                return Err(internal("contracting a value"));
            }
            if let Asc(e1, u, _) = &**inner {
                if u.is_raw() {
                    return Ok(match trans(e1, e2) {
                        Ok(e) => Contracted::Step(Asc(e, u.clone(), g2.clone()), "Rasc"),
                        Err(why) => match opts.dip.then(|| dip(store, inner, e2)).flatten() {
                            Some(adj) => Contracted::Step(TermEps::asc(e2.clone(), adj, g2.clone()), "Rasc-dip"),
                            None => Contracted::Error(why.to_string()),
                        },
                    });
                }
            }
            Err(internal(format!("stuck ascription {t}")))
        }
        Const(_) | Lam(..) | TyLam(..) | Pack(..) => Err(internal(format!("bare raw value {t}"))),
        Var(x) => Err(internal(format!("free variable {x}"))),
        Op(op, args) => {
            let cs: Option<Vec<syntax::Const>> = args.iter().map(raw_const).collect();
            let r = cs.and_then(|cs| op.apply(&cs));
            match r {
                Some(c) => {
                    let g = Ty::Base(c.base());
                    Ok(Contracted::Step(TermEps::asc(Evidence::refl(g.clone()), Const(c), g), "Rop"))
                }
                None => Err(internal(format!("operator {} on non-constant", op.symbol()))),
            }
        }
        App(f, a) => {
            let Asc(e1, lam, g1) = &**f else { unreachable!() };
            let Lam(x, g11, body) = &**lam else {
                return Err(internal(format!("applying non-function {f}")));
            };
            let Ty::Arrow(_, g_res) = g1 else {
                return Err(internal(format!("function ascribed to {g1}")));
            };
            let Asc(e_arg, u, g_arg) = &**a else { unreachable!() };
            let dom = ev_invert(Inversion::Dom, e1).ok_or("bad function evidence")?;
            let cod = ev_invert(Inversion::Cod, e1).ok_or("bad function evidence")?;
            match trans(e_arg, &dom) {
                Ok(e) => {
                    let arg = Asc(e, u.clone(), g11.clone());
                    Ok(Contracted::Step(TermEps::asc(cod, body.subst(x, &arg), (**g_res).clone()), "Rapp"))
                }
                Err(why) => match opts.dip.then(|| dip(store, a, &dom)).flatten() {
                    Some(adj) => {
                        let _ = g_arg;
                        Ok(Contracted::Step(App(f.clone(), Box::new(adj)), "Rapp-dip"))
                    }
                    None => Ok(Contracted::Error(why.to_string())),
                },
            }
        }
        TyApp(f, g_arg) => {
            let Asc(e, tl, g) = &**f else { unreachable!() };
            let TyLam(x, body) = &**tl else {
                return Err(internal(format!("instantiating non-type-abstraction {f}")));
            };
            let e = expand_forall(e);
            let Ty::Forall(y, gbody) = g else {
                return Err(internal(format!("type abstraction ascribed to {g}")));
            };
            let before = store.clone();
            let alpha = store.fresh(g_arg.clone());
            let name = Ty::Name(alpha);
            let sealed = lift(store, &name);
            let inner_ev = ev_inst(&e, &sealed).ok_or("bad universal evidence")?;
            let out = out_evidence(&e, alpha, g_arg, &before, store).ok_or("bad universal evidence")?;
            let inner = TermEps::asc(inner_ev, body.subst_ty(x, &name, &sealed), gbody.subst(y, &name));
            Ok(Contracted::Step(TermEps::asc(out, inner, gbody.subst(y, g_arg)), "RappT"))
        }
        Pair(a, b) => {
            let (Asc(e1, u1, g1), Asc(e2, u2, g2)) = (&**a, &**b) else { unreachable!() };
            Ok(Contracted::Step(
                TermEps::asc(
                    ev_pair(e1, e2),
                    Pair(u1.clone(), u2.clone()),
                    Ty::Pair(Box::new(g1.clone()), Box::new(g2.clone())),
                ),
                "Rpair",
            ))
        }
        Proj(i, a) => {
            let Asc(e, p, g) = &**a else { unreachable!() };
            let Pair(u1, u2) = &**p else {
                return Err(internal(format!("projecting non-pair {a}")));
            };
            let Ty::Pair(g1, g2) = g else {
                return Err(internal(format!("pair ascribed to {g}")));
            };
            let kind = if *i == 1 { Inversion::Proj1 } else { Inversion::Proj2 };
            let ev = ev_invert(kind, e).ok_or("bad pair evidence")?;
            let (u, gi) = if *i == 1 { (u1, g1) } else { (u2, g2) };
            Ok(Contracted::Step(TermEps::asc(ev, (**u).clone(), (**gi).clone()), "Rproj"))
        }
        If(c, a, b) => {
            match raw_const(c) {
                Some(syntax::Const::Bool(true)) => Ok(Contracted::Step((**a).clone(), "Rif")),
                Some(syntax::Const::Bool(false)) => Ok(Contracted::Step((**b).clone(), "Rif")),
                _ => Err(internal(format!("non-boolean condition {c}"))),
            }
        }
        Unpack(x, y, a, body) => {
            let Asc(e, pk, g_outer) = &**a else { unreachable!() };
            let Pack(w, v, _) = &**pk else {
                return Err(internal(format!("unpacking non-package {a}")));
            };
            let Asc(e1, u, _) = &**v else { unreachable!() };
            let e = expand_exists(e);
            if !matches!(g_outer, Ty::Exists(..)) {
                return Err(internal(format!("package ascribed to {g_outer}")));
            }
            let rep = lift(store, w);
            let alpha = store.fresh(w.clone());
            let name = Ty::Name(alpha);
            let sealed = lift(store, &name);
            let inst = ev_inst_exists(&e, &rep, &sealed).ok_or("bad existential evidence")?;
            let schema = g_outer.body_as(x).unwrap().subst(x, &name);
            match trans(e1, &inst) {
                Ok(ev) => {
                    let arg = Asc(ev, u.clone(), schema);
                    let opened = body.subst_ty(x, &name, &sealed);
                    Ok(Contracted::Step(opened.subst(y, &arg), "Runpack"))
                }
                Err(why) => Ok(Contracted::Error(why.to_string())),
            }
        }
    }
}

fn expand_forall(e: &Evidence) -> Evidence {
    let f = |t: &Ty| match t {
        Ty::Unknown => Ty::Forall(TyVar::new("X"), Box::new(Ty::Unknown)),
        t => t.clone(),
    };
    Evidence::new(f(&e.left), f(&e.right))
}

fn expand_exists(e: &Evidence) -> Evidence {
    let f = |t: &Ty| match t {
        Ty::Unknown => Ty::Exists(TyVar::new("X"), Box::new(Ty::Unknown)),
        t => t.clone(),
    };
    Evidence::new(f(&e.left), f(&e.right))
}

/// One recorded reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceEntry {
    pub rule: &'static str,
    pub config: Configuration,
    pub trans: Vec<TransCall>,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub initial: Configuration,
    pub ty: Ty,
    pub outcome: Outcome,
    pub steps: usize,
    pub trace: Vec<TraceEntry>,
}

/// Run `f` on a thread with a large stack. Ascriptions pile up around
/// non-tail calls, so long runs produce deeply nested terms.
pub fn on_big_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        let h = std::thread::Builder::new()
            .stack_size(1 << 30)
            .spawn_scoped(s, f)
            .expect("spawn evaluator thread");
        h.join().unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

/// Evaluate an elaborated configuration.
pub fn run_config(c: Configuration, ty: &Ty, opts: &EvalOptions) -> Result<Run, EvalError> {
    on_big_stack(|| run_config_here(c, ty, opts))
}

fn run_config_here(c: Configuration, ty: &Ty, opts: &EvalOptions) -> Result<Run, EvalError> {
    record_trans(opts.trace && opts.trace_trans);
    let r = run_loop(c, ty, opts);
    record_trans(false);
    r
}

fn run_loop(c: Configuration, ty: &Ty, opts: &EvalOptions) -> Result<Run, EvalError> {
    let initial = c.clone();
    let mut cur = c;
    let mut trace = Vec::new();
    for n in 0..opts.max_steps {
        let r = step_in_place(&mut cur, opts).map_err(|detail| EvalError::Internal { step: n + 1, detail })?;
        match r {
            Red::Value => {
                let outcome = Outcome::Value(cur.store.clone(), cur.term.clone());
                return Ok(Run { initial, ty: ty.clone(), outcome, steps: n, trace });
            }
            Red::Error(detail) => {
                let outcome = Outcome::RuntimeError { step: n + 1, detail };
                return Ok(Run { initial, ty: ty.clone(), outcome, steps: n + 1, trace });
            }
            Red::Step(rule) => {
                if opts.debug_typecheck {
                    match typecheck_eps(&TypeEnv::with_store(cur.store.clone()), &cur.term) {
                        Ok(g) if g == *ty => {}
                        Ok(g) => {
                            return Err(EvalError::Internal {
                                step: n + 1,
                                detail: format!("{rule} changed the type from {ty} to {g}"),
                            })
                        }
                        Err(e) => {
                            return Err(EvalError::Internal {
                                step: n + 1,
                                detail: format!("{rule} produced an ill-typed term: {e}: {}", cur.term),
                            })
                        }
                    }
                }
                if opts.trace {
                    trace.push(TraceEntry { rule, config: cur.clone(), trans: take_trans_calls() });
                }
            }
        }
    }
    // the budget may run out exactly on a value
    if cur.term.is_value() {
        let outcome = Outcome::Value(cur.store.clone(), cur.term.clone());
        return Ok(Run { initial, ty: ty.clone(), outcome, steps: opts.max_steps, trace });
    }
    Ok(Run {
        initial,
        ty: ty.clone(),
        outcome: Outcome::Timeout(opts.max_steps),
        steps: opts.max_steps,
        trace,
    })
}

/// Elaborate and evaluate a closed source term.
pub fn eval(t: &Term, opts: &EvalOptions) -> Result<Outcome, EvalError> {
    Ok(run(t, opts)?.outcome)
}

pub fn run(t: &Term, opts: &EvalOptions) -> Result<Run, EvalError> {
    let (e, ty) = elaborate_with(t, Mode::Compact)?;
    run_config(Configuration::new(e), &ty, opts)
}

/// Elaborate and evaluate with tracing on.
pub fn trace(t: &Term, opts: &EvalOptions) -> Result<Run, EvalError> {
    let opts = EvalOptions { trace: true, ..opts.clone() };
    run(t, &opts)
}

#[derive(Clone, Debug, PartialEq)]
pub enum LockstepVerdict {
    Held(usize),
    LeftErrorFirst(usize),
    PrecisionBroken { step: usize, reason: String },
    RightStuck(usize),
}

impl LockstepVerdict {
    pub fn ok(&self) -> bool {
        matches!(self, LockstepVerdict::Held(_) | LockstepVerdict::LeftErrorFirst(_))
    }
}

impl fmt::Display for LockstepVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LockstepVerdict::Held(n) => write!(f, "Held({n})"),
            LockstepVerdict::LeftErrorFirst(n) => write!(f, "LeftErrorFirst({n})"),
            LockstepVerdict::PrecisionBroken { step, reason } => {
                write!(f, "PrecisionBroken at step {step}: {reason}")
            }
            LockstepVerdict::RightStuck(n) => write!(f, "RightStuck({n})"),
        }
    }
}

/// Run two strictly-related programs side by side, checking configuration
/// precision after every paired step.
pub fn lockstep_check(t1: &Term, t2: &Term, opts: &EvalOptions) -> Result<LockstepVerdict, EvalError> {
    let (e1, _) = elaborate_with(t1, Mode::Uniform)?;
    let (e2, _) = elaborate_with(t2, Mode::Uniform)?;
    Ok(lockstep_configs(Configuration::new(e1), Configuration::new(e2), opts))
}

pub fn lockstep_configs(c1: Configuration, c2: Configuration, opts: &EvalOptions) -> LockstepVerdict {
    on_big_stack(|| lockstep_here(c1, c2, opts))
}

fn lockstep_here(mut c1: Configuration, mut c2: Configuration, opts: &EvalOptions) -> LockstepVerdict {
    let related = |a: &Configuration, b: &Configuration| {
        config_precision(&a.store, &a.term, &b.store, &b.term)
    };
    if !related(&c1, &c2) {
        return LockstepVerdict::PrecisionBroken { step: 0, reason: "initial configurations unrelated".into() };
    }
    for n in 1..=opts.max_steps {
        let broken = |reason: String| LockstepVerdict::PrecisionBroken { step: n, reason };
        let r1 = match step(&c1, opts) {
            Ok(r) => r,
            Err(e) => return broken(format!("left stuck: {e}")),
        };
        match r1 {
            StepResult::AlreadyValue => {
                return if c2.term.is_value() {
                    LockstepVerdict::Held(n - 1)
                } else {
                    broken(format!("left is a value but right is {}", c2.term))
                };
            }
            StepResult::RuntimeError(_) => return LockstepVerdict::LeftErrorFirst(n),
            StepResult::Stepped(n1, _) => match step(&c2, opts) {
                Ok(StepResult::Stepped(n2, _)) => {
                    if !related(&n1, &n2) {
                        return broken(format!("{} vs {}", n1.term, n2.term));
                    }
                    c1 = n1;
                    c2 = n2;
                }
                Ok(StepResult::RuntimeError(e)) => return broken(format!("right failed alone: {e}")),
                Ok(StepResult::AlreadyValue) | Err(_) => return LockstepVerdict::RightStuck(n),
            },
        }
    }
    LockstepVerdict::Held(opts.max_steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_gsf;

    fn go(src: &str) -> Outcome {
        let t = parse_gsf(src).unwrap();
        let opts = EvalOptions { debug_typecheck: true, ..EvalOptions::default() };
        eval(&t, &opts).unwrap()
    }

    #[test]
    fn identity_program() {
        assert_eq!(
            go("let f:forall X.X->X = /\\X.\\x:X.x in (f [Int] 1) + 1").constant(),
            Some(Const::Int(2))
        );
    }

    #[test]
    fn sealing_detects_misuse() {
        assert!(go("let g:? = /\\X.\\x:X.x in g [Int] true").is_error());
        assert!(go("(/\\X.\\x:X. let y:? = x in let z:? = y in z + 1) [Int] 1").is_error());
    }

    #[test]
    fn records_transitivity_calls_on_request() {
        let t = parse_gsf("((/\\X.\\x:X.x) :: forall X.X->?) [Int] 1").unwrap();
        let opts = EvalOptions { trace_trans: true, ..EvalOptions::default() };
        let r = trace(&t, &opts).unwrap();
        assert!(r.trace.iter().any(|e| !e.trans.is_empty()));
        let r = trace(&t, &EvalOptions::default()).unwrap();
        assert!(r.trace.iter().all(|e| e.trans.is_empty()));
    }

    #[test]
    fn value_does_not_step() {
        let (e, _) = crate::elaborate::elaborate(&parse_gsf("1").unwrap()).unwrap();
        let r = step(&Configuration::new(e), &EvalOptions::default()).unwrap();
        assert_eq!(r, StepResult::AlreadyValue);
    }
}
