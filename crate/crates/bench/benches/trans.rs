use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use gsf::gen::Gen;
use gsf::trans;

fn chains(c: &mut Criterion) {
    let store = Gen::evidence_store();
    let mut g = Gen::new(1);
    let pairs: Vec<_> = (0..1000).map(|_| g.evidence_chain(&store, 2)).collect();
    c.bench_function("trans 1000 pairs", |b| {
        b.iter(|| {
            for p in &pairs {
                let _ = black_box(trans(&p[0], &p[1]));
            }
        })
    });
}

criterion_group!(benches, chains);
criterion_main!(benches);
