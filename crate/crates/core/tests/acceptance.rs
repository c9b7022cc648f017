mod common;

use common::*;
use gsf::elaborate::Mode;
use gsf::eval::run_config;
use gsf::gen::Gen;
use gsf::precision::PrecCtx;
use gsf::seal::{differential_check_with, Embedding};
use gsf::syntax::build;
use gsf::types::{evidence_precision, evidence_strict, int, sealed, unk};
use gsf::*;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

// Sizes and budgets of the acceptance runs.
const STATIC_GENERATED: usize = 1000;
const SGG_TRIALS: usize = 1000;
const TRANS_TRIPLES: usize = 10_000;
const MONO_QUADS: usize = 10_000;
const ORACLE_DEPTH: usize = 3;
const THM_BODIES: usize = 10;
const LOCKSTEP_MUTATIONS: usize = 500;
const LOCKSTEP_BUDGET: usize = 500;
const SEAL_FUZZ: usize = 500;
const SEAL_BUDGET: usize = 10_000;
const SAFETY_TERMS: usize = 10_000;
const SAFETY_BUDGET: usize = 10_000;

const SEM: &str = "exists X. X * ((X -> X) * (X -> Bool))";
const SEM1: &str = "exists X. X * ((X -> ?) * (X -> Bool))";
const V2: &str = "(1, (\\x:Int. 1 - x, \\x:Int. 0 < x))";
const V3: &str = "((1 :: ?), ((\\x:?. (1 :: ?) - x) :: ?, (\\x:?. (0 :: ?) < x) :: ?)) :: ?";
const V3_FLIP: &str = "((1 :: ?), ((\\x:?. not x) :: ?, (\\x:?. (0 :: ?) < x) :: ?)) :: ?";

fn expect(results: Vec<(String, String, String)>) -> Check {
    let bad: Vec<String> = results
        .iter()
        .filter(|(_, want, got)| want != got)
        .map(|(src, want, got)| format!("{src}: expected {want}, got {got}"))
        .collect();
    if bad.is_empty() {
        Ok(format!("{} programs", results.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn golden_check(dip: bool) -> Check {
    expect(
        golden()
            .into_iter()
            .map(|(src, want)| {
                let got = summary(&outcome(&src, dip));
                (src, want.to_string(), got)
            })
            .collect(),
    )
}

fn c1_golden() -> Check {
    golden_check(false)
}

/// Does `s` contain the pieces of `pattern` between `...` in order?
fn elided_match(s: &str, pattern: &str) -> bool {
    let mut rest = s;
    for piece in pattern.split("...") {
        match rest.find(piece) {
            Some(i) => rest = &rest[i + piece.len()..],
            None => return false,
        }
    }
    true
}

fn c2_traces() -> Check {
    let t = parse("((/\\X.\\x:X.x) :: forall X.X->?) [Int] 1");
    let r = trace(&t, &EvalOptions::default()).map_err(|e| e.to_string())?;
    let want_initial = "(<forall X.X->X,forall X.X->X> (/\\X. \\x:X. x) :: forall X.X->?) [Int] (<Int,Int> 1 :: Int)";
    let want = [
        ("RappT", "(<a0^Int->a0^Int,Int->Int> (<a0^Int->a0^Int,a0^Int->a0^Int> (\\x:a0. x) :: a0->?) :: Int->?) (<Int,Int> 1 :: Int)"),
        ("Rasc", "(<a0^Int->a0^Int,Int->Int> (\\x:a0. x) :: Int->?) (<Int,Int> 1 :: Int)"),
        ("Rapp", "<a0^Int,Int> (<Int,a0^Int> 1 :: a0) :: ?"),
        ("Rasc", "<Int,Int> 1 :: ?"),
    ];
    if r.initial.term.to_string() != want_initial {
        return Err(format!("initial term {}", r.initial.term));
    }
    if r.trace.len() != want.len() {
        return Err(format!("{} steps instead of {}", r.trace.len(), want.len()));
    }
    for (i, (e, (rule, term))) in r.trace.iter().zip(want).enumerate() {
        if e.rule != rule || e.config.term.to_string() != term {
            return Err(format!("step {}: {} {}", i + 1, e.rule, e.config.term));
        }
    }
    let store = r.trace.last().map(|e| e.config.store.to_string()).unwrap_or_default();
    if store != "{a0:=Int}" {
        return Err(format!("final store {store}"));
    }

    let src = format!("unpack <X,x> = pack<?, {V3}> as {SEM} in (snd (snd x)) ((fst (snd x)) (fst x))");
    let r = trace(&parse(&src), &EvalOptions::default()).map_err(|e| e.to_string())?;
    let milestones = [
        "<?->Bool,a0^?->Bool> (\\x:?. ...) :: a0->Bool",
        "(<?->Int,a0^?->a0^Int> (\\x:?. ...) :: a0->a0) (<Int,a0^Int> 1 :: a0)",
        "(<Int,a0^Int> ((...) - (...)) :: a0)",
        "(<Int,a0^Int> 0 :: a0)",
    ];
    let mut steps = r.trace.iter().map(|e| e.config.term.to_string());
    for m in milestones {
        if !steps.any(|s| elided_match(&s, m)) {
            return Err(format!("semaphore trace misses {m}"));
        }
    }
    let fin = r.outcome.to_string();
    if fin != "<Bool,Bool> false :: Bool" {
        return Err(format!("semaphore result {fin}"));
    }
    Ok(format!("4-step trace exact; semaphore trace in {} steps", r.steps))
}

fn c3_conservative() -> Check {
    let opts = EvalOptions { debug_typecheck: true, ..EvalOptions::default() };
    let mut g = Gen::new(3);
    let corpus = STATIC_PROGRAMS.iter().map(|(s, _)| parse(s));
    let generated = (0..STATIC_GENERATED).map(|_| g.static_program(4)).collect::<Vec<_>>();
    let mut n = 0;
    for t in corpus.chain(generated) {
        if !t.is_static() {
            return Err(format!("not a static program: {t}"));
        }
        let sf = typecheck_sf(&TypeEnv::new(), &t).ok();
        let gsf = typecheck_gsf(&TypeEnv::new(), &t).ok();
        if sf != gsf {
            return Err(format!("{t}: {sf:?} vs {gsf:?}"));
        }
        if sf.is_none() {
            return Err(format!("ill-typed: {t}"));
        }
        if eval(&t, &opts).map_err(|e| e.to_string())?.is_error() {
            return Err(format!("runtime error: {t}"));
        }
        n += 1;
    }
    Ok(format!("{} corpus + {STATIC_GENERATED} generated, {n} agree", STATIC_PROGRAMS.len()))
}

fn c4_static_guarantee() -> Check {
    let mut g = Gen::new(4);
    for _ in 0..SGG_TRIALS {
        let t = g.gradual_program(4);
        let m = g.precision_mutation(&t);
        if !term_precision(&t, &m) {
            return Err(format!("mutation not less precise: {t} / {m}"));
        }
        let g1 = typecheck_gsf(&TypeEnv::new(), &t).map_err(|e| e.to_string())?;
        match typecheck_gsf(&TypeEnv::new(), &m) {
            Ok(g2) if precision(&g1, &g2) => {}
            other => return Err(format!("{t} : {g1} but {m} : {other:?}")),
        }
    }
    Ok(format!("{SGG_TRIALS} mutations"))
}

fn c5_transitivity() -> Check {
    let store = Gen::evidence_store();
    let mut g = Gen::new(5);
    let mut defined = 0;
    for _ in 0..TRANS_TRIPLES {
        let c = g.evidence_chain(&store, 3);
        // undefined results may differ in the reason they give
        let l = trans(&c[0], &c[1]).and_then(|e| trans(&e, &c[2])).ok();
        let r = trans(&c[1], &c[2]).and_then(|e| trans(&c[0], &e)).ok();
        if l != r {
            return Err(format!("associativity: {} ; {} ; {}: {l:?} vs {r:?}", c[0], c[1], c[2]));
        }
        if let Ok(e) = trans(&c[0], &c[1]) {
            defined += 1;
            if !(precision(&e.left, &c[0].left) && precision(&e.right, &c[1].right)) {
                return Err(format!("optimality: {} ; {} = {e}", c[0], c[1]));
            }
        }
    }

    let ai = sealed(0, int());
    let e1 = Evidence::new(int(), ai.clone());
    let e2 = Evidence::new(ai.clone(), int());
    let e2q = Evidence::unknown();
    let a = trans(&e1, &e2).map_err(|e| e.to_string())?;
    let b = trans(&e1, &e2q).map_err(|e| e.to_string())?;
    let reproduced = evidence_precision(&e2, &e2q)
        && a == Evidence::new(int(), int())
        && b == Evidence::new(int(), ai.clone())
        && !evidence_precision(&a, &b)
        && !evidence_strict(&e2, &e2q);
    if !reproduced {
        return Err(format!("counterexample: {a} and {b}"));
    }

    let mut mono_defined = 0;
    for _ in 0..MONO_QUADS {
        let c = g.evidence_chain(&store, 2);
        let d0 = g.loosen_evidence_strict(&c[0]);
        let d1 = g.loosen_evidence_strict(&c[1]);
        if let Ok(e) = trans(&c[0], &c[1]) {
            mono_defined += 1;
            match trans(&d0, &d1) {
                Ok(f) if evidence_strict(&e, &f) => {}
                other => return Err(format!("monotonicity: {} ; {} vs {d0} ; {d1}: {e} vs {other:?}", c[0], c[1])),
            }
        }
    }
    Ok(format!(
        "{TRANS_TRIPLES} triples ({defined} defined), counterexample exact, {MONO_QUADS} quadruples ({mono_defined} defined)"
    ))
}

fn c6_oracle() -> Check {
    let r = gsf::oracle::exhaustive(ORACLE_DEPTH, 100);
    if r.clean() {
        Ok(format!("{} types, {} pairs, {} glb samples", r.types, r.pairs, r.glb_sampled))
    } else {
        Err(format!("{r:?}"))
    }
}

fn c7_dgg_counterexample() -> Check {
    let a = summary(&outcome("(/\\X.\\x:X. x :: X) [Int] 1", false));
    let b = summary(&outcome("(/\\X.\\x:?. x :: X) [Int] 1", false));
    if (a.as_str(), b.as_str()) != ("1", "error") {
        return Err(format!("id_X gives {a}, id_? gives {b}"));
    }
    let mut g = Gen::new(7);
    let insts = [(int(), build::int(1)), (gsf::types::bool_(), build::bool_(true)),
        (gsf::types::arrow(int(), int()), build::lam("n", int(), build::var("n")))];
    let opts = EvalOptions { debug_typecheck: true, ..EvalOptions::with_steps(SEAL_BUDGET) };
    let mut counts = (0, 0);
    for k in 0..THM_BODIES {
        let x = build::var("x");
        let body = match k % 3 {
            0 => build::app(embed_dyn(&g.dyn_function(3)).map_err(|e| e.0)?, x),
            1 => build::let_("d", Some(unk()), embed_dyn(&g.dyn_term(3)).map_err(|e| e.0)?, x),
            _ => build::proj(1, build::pair(x, embed_dyn(&g.dyn_term(3)).map_err(|e| e.0)?)),
        };
        let v = build::tylam("X", build::lam("x", unk(), build::asc(body, gsf::types::tvar("X"))));
        let ty = typecheck_gsf(&TypeEnv::new(), &v).map_err(|e| format!("{v}: {e}"))?;
        if ty.to_string() != "forall X.?->X" {
            return Err(format!("{v} : {ty}"));
        }
        for (t, arg) in &insts {
            let prog = build::app(build::tyapp(v.clone(), t.clone()), arg.clone());
            match eval(&prog, &opts).map_err(|e| e.to_string())? {
                Outcome::RuntimeError { .. } => counts.0 += 1,
                Outcome::Timeout(_) => counts.1 += 1,
                Outcome::Value(_, w) => return Err(format!("{prog} reduced to {w}")),
            }
        }
    }
    Ok(format!("1 vs error; {THM_BODIES} bodies: {} errors, {} timeouts", counts.0, counts.1))
}

fn c8_weak_dgg() -> Check {
    let opts = EvalOptions::with_steps(LOCKSTEP_BUDGET);
    let mut held = 0;
    let mut left = 0;
    let mut tally = |v: LockstepVerdict, what: &dyn Fn() -> String| match v {
        LockstepVerdict::Held(_) => {
            held += 1;
            Ok(())
        }
        LockstepVerdict::LeftErrorFirst(_) => {
            left += 1;
            Ok(())
        }
        v => Err(format!("{}: {v}", what())),
    };
    for (a, b) in LOCKSTEP_PAIRS {
        let (t1, t2) = (parse(a), parse(b));
        if strict_term_precision_gsf(&mut PrecCtx::default(), &t1, &t2).is_none() {
            return Err(format!("not strictly related: {a} / {b}"));
        }
        let v = lockstep_check(&t1, &t2, &opts).map_err(|e| e.to_string())?;
        tally(v, &|| format!("{a} / {b}"))?;
    }
    let mut g = Gen::new(8);
    let mut n = 0;
    while n < LOCKSTEP_MUTATIONS {
        let t1 = g.gradual_program(4);
        let t2 = g.precision_mutation(&t1);
        if strict_term_precision_gsf(&mut PrecCtx::default(), &t1, &t2).is_none() {
            continue;
        }
        n += 1;
        let v = lockstep_check(&t1, &t2, &opts).map_err(|e| e.to_string())?;
        tally(v, &|| format!("{t1} / {t2}"))?;
    }
    Ok(format!("{} hand + {n} generated: {held} held, {left} left error first", LOCKSTEP_PAIRS.len()))
}

fn run_uniform(src: &str) -> Result<Outcome, String> {
    let (e, ty) = elaborate_with(&parse(src), Mode::Uniform).map_err(|e| e.to_string())?;
    let r = run_config(Configuration::new(e), &ty, &EvalOptions::default()).map_err(|e| e.to_string())?;
    Ok(r.outcome)
}

fn c9_free_theorem() -> Check {
    let terms = [
        ("/\\X.\\x:X.x", "Int", "1"),
        ("/\\X.\\x:X.(\\y:X.y) x", "Bool", "true"),
        ("/\\X.\\x:X. fst (x, 1)", "Int", "4"),
        ("/\\X.\\x:X. if true then x else x", "Bool", "false"),
        ("/\\X.\\x:X. let y:X = x in y", "Int", "2"),
        ("/\\X.\\x:X. (/\\Y.\\y:Y.y) [X] x", "Int->Int", "\\n:Int. n + 1"),
        ("/\\X.\\x:X.\\f:X->X. f x", "Int", "3"),
        ("/\\X.\\x:X.\\n:Int. x", "Bool", "true"),
        ("/\\X.\\f:Int->X. f 1", "Int", "\\n:Int. n + 1"),
        ("/\\X.\\p:X*Int. fst p", "Bool", "(true, 3)"),
    ];
    let targets = ["forall X.X->?", "forall X.?->X"];
    let mut runs = 0;
    for (t, inst, arg) in terms {
        let ty = typecheck_sf(&TypeEnv::new(), &parse(t)).map_err(|e| format!("{t}: {e}"))?;
        let mut used = 0;
        for a in targets {
            if !precision(&ty, &parse_type(a).map_err(|e| e.to_string())?) {
                continue;
            }
            used += 1;
            let plain = run_uniform(&format!("({t}) [{inst}] ({arg})"))?;
            let ascribed = run_uniform(&format!("(({t}) :: {a}) [{inst}] ({arg})"))?;
            match (&plain, &ascribed) {
                (Outcome::Value(s1, v1), Outcome::Value(s2, v2)) if config_precision(s1, v1, s2, v2) => runs += 1,
                _ => return Err(format!("{t} :: {a}: {plain} vs {ascribed}")),
            }
        }
        if used == 0 {
            return Err(format!("{t} : {ty} fits neither target"));
        }
    }
    Ok(format!("{} terms, {runs} ascribed runs related", terms.len()))
}

fn seal_class(o: &SealOutcome) -> String {
    match o {
        SealOutcome::Value(_, SealTerm::Const(Const::Int(n))) => n.to_string(),
        SealOutcome::Value(_, SealTerm::Const(Const::Bool(b))) => b.to_string(),
        SealOutcome::Value(..) => "value".into(),
        SealOutcome::UnsealError | SealOutcome::TypeError(_) => "error".into(),
        SealOutcome::SealTypeError(e) => format!("seal type error {e}"),
        SealOutcome::Timeout(_) => "timeout".into(),
    }
}

fn c10_sealing() -> Check {
    let opts = EvalOptions::default();
    let mut pair = Vec::new();
    for src in [TWO_SEALS, SWAPPED_SEALS] {
        let t = parse_seal(src).map_err(|e| e.to_string())?;
        pair.push(seal_class(&eval_seal(&t, SEAL_BUDGET)));
        pair.push(summary(&eval(&embed_seal(&t), &opts).map_err(|e| e.to_string())?));
    }
    if pair != ["2", "2", "error", "error"] {
        return Err(format!("sealing pair gives {pair:?}"));
    }
    for (src, want) in SEAL_PROGRAMS {
        let t = parse_seal(src).map_err(|e| e.to_string())?;
        let got = seal_class(&eval_seal(&t, SEAL_BUDGET));
        if got != *want {
            return Err(format!("{src}: expected {want}, got {got}"));
        }
        match differential_check_with(&t, SEAL_BUDGET, Embedding::Seal) {
            Verdict::Agree(_) => {}
            v => return Err(format!("{src}: {v}")),
        }
    }
    let mut g = Gen::new(10);
    let mut n = 0;
    while n < SEAL_FUZZ {
        let t = g.seal_term(4);
        match differential_check_with(&t, SEAL_BUDGET, Embedding::Seal) {
            Verdict::Agree(_) => n += 1,
            Verdict::Skipped => {}
            v => return Err(format!("{t}: {v}")),
        }
    }
    let mut timeouts = 0;
    for (src, want) in DYN_PROGRAMS {
        let t = parse_dyn(src).map_err(|e| e.to_string())?;
        let got = seal_class(&eval_seal(&t, SEAL_BUDGET));
        if got != *want {
            return Err(format!("{src}: expected {want}, got {got}"));
        }
        match differential_check_with(&t, SEAL_BUDGET, Embedding::Dyn) {
            Verdict::Agree(d) => timeouts += (d == "timeout") as usize,
            v => return Err(format!("{src}: {v}")),
        }
    }
    for _ in 0..SEAL_FUZZ {
        let t = g.dyn_term(4);
        match differential_check_with(&t, SEAL_BUDGET, Embedding::Dyn) {
            Verdict::Agree(_) => {}
            v => return Err(format!("{t}: {v}")),
        }
    }
    Ok(format!(
        "pair (2, error) both ways; {} + {SEAL_FUZZ} sealing and {} + {SEAL_FUZZ} dynamic programs agree ({timeouts} co-timeouts)",
        SEAL_PROGRAMS.len(),
        DYN_PROGRAMS.len()
    ))
}

fn c11_dip() -> Check {
    let scenarios = [
        "let id : forall X.X->X = /\\X.\\x:X.x in let f : ? = \\y:?. y 1 in f id",
        "let g : ? = \\x:(forall X.X->X). x [Int] 1 in let h : ? = \\x:?. x in g h",
        "let f : ? = /\\Y.\\y:?.\\x:?.x in let g : forall Y.Y->(forall X.X->X) = f in (g [Int] 1) [Int] 2",
    ];
    let got: Vec<String> = scenarios.iter().map(|s| summary(&outcome(s, true))).collect();
    if got != ["1", "1", "2"] {
        return Err(format!("scenarios give {got:?}"));
    }
    let off: Vec<String> = scenarios.iter().map(|s| summary(&outcome(s, false))).collect();
    if off.iter().any(|o| o != "error") {
        return Err(format!("without dip the scenarios give {off:?}"));
    }
    let lazy = "(\\x:Int. x) :: ? :: Bool -> Bool";
    let v = outcome(lazy, true);
    let applied = summary(&outcome(&format!("({lazy}) true"), true));
    if !v.is_value() || applied != "error" {
        return Err(format!("lazy term gives {v}, applied {applied}"));
    }
    golden_check(false)?;
    for src in [TWO_SEALS, SWAPPED_SEALS] {
        let t = parse_seal(src).map_err(|e| e.to_string())?;
        if !differential_check_with(&t, SEAL_BUDGET, Embedding::Seal).is_agree() {
            return Err(format!("{src} changed without dip"));
        }
    }
    Ok("1, 1, 2; lazy value errors on true; results without dip unchanged".into())
}

fn c12_existentials() -> Check {
    let client = |s: &str| format!("let s : {SEM} = {s} in unpack <X,x> = s in (snd (snd x)) ((fst (snd x)) (fst x))");
    let s2 = format!("pack<Int, {V2}> as {SEM}");
    let g = "let g : ? = (\\f:?. (\\x:?. f x) :: ?) :: ? in ";
    let cases = vec![
        (client(&format!("pack<?, {V3}> as {SEM}")), "false"),
        (client(&format!("pack<?, {V3_FLIP}> as {SEM}")), "error"),
        (format!("{g}unpack <X,x> = {s2} in (g (snd (snd x))) (1 :: ?)"), "error"),
        (
            format!("unpack <X,x> = ({s2} :: {SEM1}) in (snd (snd x)) ((fst (snd x)) ((fst (snd x)) (fst x)))"),
            "true",
        ),
        (
            format!("unpack <X,x> = pack<Int, {V2}> as {SEM1} in ((fst (snd x)) ((fst (snd x)) (fst x))) + 10"),
            "error",
        ),
    ];
    expect(
        cases
            .into_iter()
            .map(|(src, want)| {
                let got = summary(&outcome(&src, false));
                (src, want.to_string(), got)
            })
            .collect(),
    )
}

fn c13_safety() -> Check {
    let opts = EvalOptions { debug_typecheck: true, ..EvalOptions::with_steps(SAFETY_BUDGET) };
    let mut g = Gen::new(13);
    let mut counts = [0; 3];
    for _ in 0..SAFETY_TERMS {
        let t = g.gradual_program(4);
        match eval(&t, &opts) {
            Ok(Outcome::Value(..)) => counts[0] += 1,
            Ok(Outcome::RuntimeError { .. }) => counts[1] += 1,
            Ok(Outcome::Timeout(_)) => counts[2] += 1,
            Err(e) => return Err(format!("{t}: {e}")),
        }
    }
    Ok(format!("{} values, {} errors, {} timeouts", counts[0], counts[1], counts[2]))
}

fn main() {
    let criteria: [Criterion; 13] = [
        ("golden examples", c1_golden),
        ("evidence traces", c2_traces),
        ("conservative extension", c3_conservative),
        ("static gradual guarantee", c4_static_guarantee),
        ("consistent transitivity", c5_transitivity),
        ("oracle equivalence", c6_oracle),
        ("gradual guarantee counterexample", c7_dgg_counterexample),
        ("weak gradual guarantee", c8_weak_dgg),
        ("free theorem", c9_free_theorem),
        ("sealing embedding", c10_sealing),
        ("dynamic implicit polymorphism", c11_dip),
        ("existentials", c12_existentials),
        ("safety fuzz", c13_safety),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = std::time::Instant::now();
        match check() {
            Ok(detail) => println!("PASS {}: {name}: {detail} ({:.2?})", i + 1, started.elapsed()),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}: {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
