use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ratquad::moments::modified_moments;
use ratquad::params::modified_weight_gr;
use ratquad::rules::{build_gaussian_rule, build_legendre_rule, build_orthogonal_rule};
use ratquad_bench::{context, ladder_params, sqrt_params};

fn table1_rules(c: &mut Criterion) {
    let ctx = context(256);
    let p = sqrt_params(6, &ctx);
    c.bench_function("gr6_sqrt_256", |b| b.iter(|| build_gaussian_rule(black_box(&p), 6, &ctx).unwrap()));
    c.bench_function("or6_sqrt_256", |b| b.iter(|| build_orthogonal_rule(black_box(&p), 6, &ctx).unwrap()));
}

fn gaussian_by_size(c: &mut Criterion) {
    let mut group = c.benchmark_group("gr_ladder");
    for bits in [128u32, 256] {
        let ctx = context(bits);
        for n in [2usize, 6, 10] {
            let p = ladder_params(n, &ctx);
            group.bench_with_input(BenchmarkId::new(format!("{bits}b"), n), &n, |b, &n| {
                b.iter(|| build_gaussian_rule(&p, n, &ctx).unwrap())
            });
        }
    }
    group.finish();
}

fn moments(c: &mut Criterion) {
    let ctx = context(256);
    let p = sqrt_params(10, &ctx);
    let mw = modified_weight_gr(&p, 10).unwrap();
    c.bench_function("moments_gr10_256", |b| b.iter(|| modified_moments(black_box(&mw), 20, &ctx).unwrap()));
}

fn legendre(c: &mut Criterion) {
    let ctx = context(256);
    c.bench_function("gl50_256", |b| b.iter(|| build_legendre_rule(black_box(50), &ctx).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = table1_rules, gaussian_by_size, moments, legendre
}
criterion_main!(benches);
