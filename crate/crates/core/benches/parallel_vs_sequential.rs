//! Multi-modular determinant with the per-prime work spread over the rayon
//! pool versus run on the calling thread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};

use okmod_core::determinant::{det_with, OkMatrix};
use okmod_core::par::Exec;
use okmod_core::{FieldElement, NumberField};

fn random_matrix(k: &NumberField, n: usize, bound: i64, seed: u64) -> OkMatrix {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let c = (0..k.degree()).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
                    FieldElement::new(c, BigInt::from(1))
                })
                .collect()
        })
        .collect();
    OkMatrix::new(rows).unwrap()
}

fn bench(c: &mut Criterion) {
    let k = NumberField::with_power_basis(&[-1, -1, 0, 1]).unwrap();
    let mut g = c.benchmark_group("det_cubic");
    g.sample_size(10);
    for n in [4, 8, 12] {
        let a = random_matrix(&k, n, 1000, n as u64);
        g.bench_with_input(BenchmarkId::new("parallel", n), &a, |b, a| b.iter(|| det_with(Exec::Auto, a, &k).unwrap()));
        g.bench_with_input(BenchmarkId::new("sequential", n), &a, |b, a| {
            b.iter(|| det_with(Exec::Sequential, a, &k).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
