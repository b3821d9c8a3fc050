use bssn_bench::{config, deblur, lasso, lcp, robust};
use bssn_core::lcp::{brute_force_lcp, damped_newton_lcp, lemke};
use bssn_core::prelude::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;
use std::hint::black_box;

fn variants(c: &mut Criterion) {
    let cases = [
        ("lasso_200x100", lasso(200, 100)),
        ("robust_500x50", robust(500, 50, 0.05)),
        ("deblur_16", deblur(16, 1e-3, 1e4)),
    ];
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    for (name, problem) in &cases {
        let u0 = DVector::zeros(problem.dim());
        for variant in [Variant::Bssn, Variant::ModBssn, Variant::Hybrid] {
            let cfg = config(variant, problem.gamma());
            group.bench_with_input(
                BenchmarkId::new(format!("{variant:?}"), name),
                problem,
                |b, p| b.iter(|| solve(p, black_box(&u0), &cfg).unwrap()),
            );
        }
    }
    group.finish();
}

fn lcp_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("lcp");
    for m in [4usize, 8, 12] {
        let inst = lcp(m, m as u64);
        group.bench_with_input(BenchmarkId::new("solve_lcp", m), &inst, |b, i| {
            b.iter(|| solve_lcp(black_box(i), 1e-10).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("damped_newton", m), &inst, |b, i| {
            b.iter(|| damped_newton_lcp(black_box(i), 1e-10, 50).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("lemke", m), &inst, |b, i| {
            b.iter(|| lemke(black_box(i), 1e-10).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("brute_force", m), &inst, |b, i| {
            b.iter(|| brute_force_lcp(black_box(i)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, variants, lcp_solvers);
criterion_main!(benches);
