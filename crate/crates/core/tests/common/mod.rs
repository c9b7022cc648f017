#![allow(dead_code)]

use gsf::{eval, parse_gsf, Const, EvalOptions, Outcome, Term};

pub fn parse(src: &str) -> Term {
    parse_gsf(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn outcome(src: &str, dip: bool) -> Outcome {
    let opts = EvalOptions { dip, debug_typecheck: true, ..EvalOptions::default() };
    eval(&parse(src), &opts).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// Constants print as themselves, everything else by outcome class.
pub fn summary(o: &Outcome) -> String {
    match o {
        Outcome::Value(..) => match o.constant() {
            Some(Const::Int(n)) => n.to_string(),
            Some(Const::Bool(b)) => b.to_string(),
            _ => "value".into(),
        },
        Outcome::RuntimeError { .. } => "error".into(),
        Outcome::Timeout(_) => "timeout".into(),
    }
}

pub const ID: &str = "let id : forall X.X->X = /\\X.\\x:X.x in ";

pub fn golden() -> Vec<(String, &'static str)> {
    let g = "let g : ? = \\a:?. \\b:?. if b then a else a + 1 in \
             let f : forall X.X->X = /\\X.\\x:X. g x ";
    let t = "let t : (forall X.?) -> ? = \\x:(forall X.?). x [Int] in ";
    vec![
        ("let f : forall X.X->X = /\\X.\\x:X.x in (f [Int] 1) + 1".into(), "2"),
        (format!("{g}true in f [Int] 10"), "10"),
        (format!("{g}false in f [Int] 10"), "error"),
        ("let f : forall X.X->? = /\\X.\\x:X.x in (f [Int] 1) + 1".into(), "2"),
        ("let g : ? = /\\X.\\x:X.x in g [Int] true".into(), "error"),
        (format!("{ID}{t}(t id) 1"), "1"),
        (format!("{ID}{t}(t id) true"), "error"),
        (
            "let p : forall X. (X -> ?) * (? -> X) = /\\X.((\\x:X. x :: ?), (\\x:?. x :: X)) in \
             let su = p [?] in let seal = fst su in let unseal = snd su in \
             (unseal (seal 1)) + 1"
                .into(),
            "2",
        ),
    ]
}

/// Static System F programs with their results.
pub const STATIC_PROGRAMS: &[(&str, &str)] = &[
    ("let f:forall X.X->X = /\\X.\\x:X.x in (f [Int] 1) + 1", "2"),
    ("(/\\X.\\x:X.x) [Bool] true", "true"),
    ("let twice : forall X.(X->X)->X->X = /\\X.\\f:X->X.\\x:X. f (f x) in twice [Int] (\\n:Int. n * 2) 5", "20"),
    ("let k = /\\X./\\Y.\\x:X.\\y:Y.x in k [Int] [Bool] 3 false", "3"),
    ("let swap = /\\X./\\Y.\\p:X*Y. (snd p, fst p) in fst (swap [Int] [Bool] (1, true))", "true"),
    ("let two : forall X.(X->X)->X->X = /\\X.\\f:X->X.\\x:X. f (f x) in two [Int] (\\n:Int. n + 3) 0", "6"),
    (
        "let compose = /\\A./\\B./\\C.\\f:B->C.\\g:A->B.\\x:A. f (g x) in \
         compose [Int] [Int] [Bool] (\\n:Int. n < 3) (\\n:Int. n + 1) 1",
        "true",
    ),
    ("if 1 < 2 then 10 else 20", "10"),
    ("let p = (1, (true, 3)) in fst (snd p)", "true"),
    ("(\\f:forall X.X->X. (f [Int] 1, f [Bool] false)) (/\\X.\\x:X.x)", "value"),
    (
        "unpack <X,x> = pack<Bool, (true, (\\x:Bool. not x, \\x:Bool. x))> as exists X. X * ((X -> X) * (X -> Bool)) \
         in (snd (snd x)) ((fst (snd x)) (fst x))",
        "false",
    ),
    (
        "unpack <X,x> = pack<Int, (1, (\\x:Int. 1 - x, \\x:Int. 0 < x))> as exists X. X * ((X -> X) * (X -> Bool)) \
         in (snd (snd x)) ((fst (snd x)) (fst x))",
        "false",
    ),
    ("let apply = /\\X./\\Y.\\f:X->Y.\\x:X. f x in apply [Int] [Int] (\\x:Int. x * x) 7", "49"),
    ("let tt : forall X.X->X->X = /\\X.\\t:X.\\f:X. t in tt [Int] 1 2", "1"),
    ("let dup = /\\X.\\x:X. (x, x) in snd (dup [Int] 4)", "4"),
    ("unpack <X, c> = pack<Int, (0, \\n:Int. n + 1)> as exists X. X * (X -> X) in 5", "5"),
    ("(/\\X. \\f:X->X. \\x:X. f x) [Int->Int] (\\g:Int->Int. g) (\\n:Int. n - 1) 10", "9"),
    ("let id = /\\X.\\x:X.x in id [forall Y.Y->Y] id [Int] 3", "3"),
    ("not (true && false) || false", "true"),
    ("let x = 3 in let y = x * x in y == 9", "true"),
    ("(\\p:Int*Bool. if snd p then fst p else 0) (42, true)", "42"),
    (
        "let poly : forall X.forall Y.(X->Y)->X->Y = /\\X./\\Y.\\f:X->Y.\\x:X. f x in \
         poly [Bool] [Int] (\\b:Bool. if b then 1 else 0) true",
        "1",
    ),
    ("unpack <X, c> = pack<Int, (1, \\x:Int. x == 1)> as exists X. X * (X -> Bool) in (snd c) (fst c)", "true"),
    ("let f = \\x:Int. \\y:Int. x - y in f 10 4", "6"),
];

/// Hand-built pairs where the left program is strictly more precise.
pub const LOCKSTEP_PAIRS: &[(&str, &str)] = &[
    ("(\\x:Int. x + 1) 2", "(\\x:?. x + 1) 2"),
    ("(\\x:Int. x + 1) (2 :: Int)", "(\\x:Int. x + 1) (2 :: ?)"),
    ("let f:Int->Int = \\x:Int. x * 2 in f 3", "let f:? = \\x:Int. x * 2 in f 3"),
    ("let f:Int->Int = \\x:Int. x * 2 in f 3", "let f:?->Int = \\x:Int. x * 2 in f 3"),
    ("(\\p:Int*Bool. fst p) (1, true)", "(\\p:?. fst p) (1, true)"),
    ("(\\p:Int*Bool. fst p) (1, true)", "(\\p:Int*?. fst p) (1, true)"),
    ("if (true :: Bool) then 1 else 2", "if (true :: ?) then 1 else 2"),
    ("(\\f:Int->Int. f 1) (\\y:Int. y)", "(\\f:?->?. f 1) (\\y:?. y)"),
    ("(\\b:Bool. if b then 1 else 0) false", "(\\b:?. if b then 1 else 0) false"),
    (
        "((/\\X.\\x:X. x :: X) :: forall X.X->X) [Int] 1",
        "((/\\X.\\x:X. x :: X) :: forall X.?->X) [Int] 1",
    ),
    ("((/\\X.\\x:X. x) :: forall X.X->X) [Int] 1", "((/\\X.\\x:X. x) :: forall X.X->?) [Int] 1"),
    ("(/\\X.\\x:X. x) [Int] (5 :: Int)", "(/\\X.\\x:X. x) [Int] (5 :: ?)"),
    ("(\\x:Int. x) ((true :: ?) :: Int)", "(\\x:?. x) ((true :: ?) :: ?)"),
    ("(1 :: ?) :: Bool", "(1 :: ?) :: ?"),
    ("(1 :: Int) + 2", "(1 :: ?) + 2"),
    ("let x:Int = 3 in x + x", "let x:? = 3 in x + x"),
    ("let g:Int->Int = \\n:Int. n in g 4", "let g:Int->? = \\n:Int. n in g 4"),
    ("(\\x:Int*Int. snd x) ((1, 2) :: Int*Int)", "(\\x:Int*Int. snd x) ((1, 2) :: ?)"),
    (
        "unpack <X,x> = pack<Int, (1, \\y:Int. y + 1)> as exists X. X * (Int -> Int) in (snd x) 2",
        "unpack <X,x> = pack<Int, (1, \\y:Int. y + 1)> as exists X. X * (Int -> ?) in (snd x) 2",
    ),
    ("unpack <X,x> = pack<Int, 1> as exists X. Int in x + 1", "unpack <X,x> = pack<?, 1> as exists X. Int in x + 1"),
    ("(\\f:Int->Int. f 1) (\\x:Int. x)", "(\\f:Int->?. f 1) (\\x:Int. x)"),
    ("(\\x:Int. x) 1", "(\\x:Int. x) 1"),
    ("fst ((1, true) :: Int*Bool)", "fst ((1, true) :: ?)"),
    ("(\\x:Bool. not x) (true :: Bool)", "(\\x:Bool. not x) (true :: ?)"),
    ("((\\x:Int. x) :: Int->Int) 4", "((\\x:Int. x) :: ?->Int) 4"),
    ("((\\x:Int. x) :: Int->Int) 4", "((\\x:Int. x) :: ?) 4"),
    (
        "let h:Int->Bool = \\n:Int. n < 5 in if h 3 then 1 else 2",
        "let h:? = \\n:Int. n < 5 in if h 3 then 1 else 2",
    ),
    ("(\\x:Int. x) ((false :: ?) :: Int)", "(\\x:?. x) ((false :: ?) :: ?)"),
    ("(/\\X.\\x:X. x) [Bool] ((true :: ?) :: Bool)", "(/\\X.\\x:X. x) [Bool] ((true :: ?) :: ?)"),
    ("(\\x:Int. x) ((\\y:Int. y) 3)", "(\\x:?. x) ((\\y:?. y) 3)"),
];

pub const TWO_SEALS: &str = "nu x. nu y. unseal z = (y, seal(seal(1, x), y)) in unseal w = (x, z) in w + 1";
pub const SWAPPED_SEALS: &str = "nu x. nu y. unseal z = (x, seal(seal(1, x), y)) in unseal w = (y, z) in w + 1";

/// Sealing programs with their source outcomes.
pub const SEAL_PROGRAMS: &[(&str, &str)] = &[
    (TWO_SEALS, "2"),
    (SWAPPED_SEALS, "error"),
    ("nu k. unseal v = (k, seal(5, k)) in v * 2", "10"),
    ("nu k. (\\f. f 3) (\\n. unseal m = (k, seal(n, k)) in m + 1)", "4"),
    ("nu a. nu b. unseal v = (b, seal(seal(1, a), b)) in unseal w = (a, v) in w", "1"),
    ("nu a. nu b. unseal v = (a, seal(seal(1, a), b)) in v", "error"),
    ("nu k. seal(1, k) + 1", "error"),
    ("nu k. (\\p. unseal v = (k, fst p) in v) (seal(true, k), 2)", "true"),
    ("(\\x. x) 1", "1"),
    ("nu k. let s = \\v. seal(v, k) in let u = \\c. unseal r = (k, c) in r in u (s 7)", "7"),
    ("nu k. let s = \\v. seal(v, k) in nu j. unseal r = (j, s 7) in r", "error"),
    ("(1, 2) 3", "error"),
    ("nu k. unseal r = (k, 5) in r", "error"),
    ("(\\x. x x) (\\x. x x)", "timeout"),
    ("nu k. fst (seal(1, k), 2)", "value"),
];

/// Dynamically typed programs with their outcomes.
pub const DYN_PROGRAMS: &[(&str, &str)] = &[
    ("1", "1"),
    ("1 2", "error"),
    ("1 ((\\x. x x) (\\x. x x))", "timeout"),
    ("(\\x. x + 1) 2", "3"),
    ("fst (1, 2)", "1"),
    ("if 1 then 2 else 3", "error"),
    ("(\\f. f (f 1)) (\\x. x * 2)", "4"),
    ("not 1", "error"),
    ("(\\x. x x) (\\x. x x)", "timeout"),
    ("snd 5", "error"),
    ("(\\p. if fst p then snd p else 0) (true, 7)", "7"),
    ("\\x. x", "value"),
];
