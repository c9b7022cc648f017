//! Programs shared by the benchmarks.

/// Church-numeral style iteration through gradually typed code.
pub fn iterate(n: usize) -> String {
    let mut body = String::from("x");
    for _ in 0..n {
        body = format!("f ({body})");
    }
    format!(
        "let twice : forall X.(X->X)->X->X = /\\X.\\f:X->X.\\x:X. {body} in \
         let g : ? = \\n:?. n + 1 in twice [Int] g 0"
    )
}

pub const SEMAPHORE: &str = "unpack <X,x> = pack<?, ((1 :: ?), ((\\x:?. (1 :: ?) - x) :: ?, (\\x:?. (0 :: ?) < x) :: ?)) :: ?> \
     as exists X. X * ((X -> X) * (X -> Bool)) in (snd (snd x)) ((fst (snd x)) (fst x))";

pub const SEALS: &str = "nu x. nu y. unseal z = (y, seal(seal(1, x), y)) in unseal w = (x, z) in w + 1";
