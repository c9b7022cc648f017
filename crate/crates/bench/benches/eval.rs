use criterion::{criterion_group, criterion_main, Criterion};
use gsf::seal::differential_check;
use gsf::{eval, parse_gsf, parse_seal, EvalOptions};
use gsf_bench::{iterate, SEALS, SEMAPHORE};

fn programs(c: &mut Criterion) {
    let opts = EvalOptions::default();
    for n in [8, 64] {
        let t = parse_gsf(&iterate(n)).unwrap();
        c.bench_function(&format!("iterate {n}"), |b| b.iter(|| eval(&t, &opts).unwrap()));
    }
    let t = parse_gsf(SEMAPHORE).unwrap();
    c.bench_function("semaphore", |b| b.iter(|| eval(&t, &opts).unwrap()));
    let s = parse_seal(SEALS).unwrap();
    c.bench_function("two seals differential", |b| b.iter(|| differential_check(&s, 10_000)));
}

criterion_group!(benches, programs);
criterion_main!(benches);
