use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use isopair::algebra::{to_alts, verify_alts, verify_isotopic_pair};
use isopair::classical::integrate_full;
use isopair::ode::Method;
use isopair::quantum::{find_representation, integrate_quantum, SearchConfig};
use isopair::superalgebra::{build_super, hom_pair};
use isopair_bench::{exact_pair, initial_state, params, sub_pair_rep};

fn algebra(c: &mut Criterion) {
    let pair = exact_pair();
    let alts = to_alts(&pair);
    c.bench_function("verify_isotopic_pair exact", |b| b.iter(|| verify_isotopic_pair(black_box(&pair), 0.0)));
    c.bench_function("verify_alts exact", |b| b.iter(|| verify_alts(black_box(&alts), 0.0)));
    c.bench_function("build_super exact", |b| b.iter(|| build_super(black_box(&alts), 0.0).unwrap()));
}

fn dynamics(c: &mut Criterion) {
    let e = params();
    let s0 = initial_state();
    c.bench_function("classical rk4 t=1 dt=1e-3", |b| {
        b.iter(|| integrate_full(black_box(&s0), &e, 1.0, 1e-3, Method::Rk4).unwrap())
    });
    c.bench_function("classical rk45 t=1", |b| b.iter(|| integrate_full(black_box(&s0), &e, 1.0, 1e-2, Method::Rk45).unwrap()));
    let rep = sub_pair_rep();
    c.bench_function("quantum rk4 t=0.1 dt=1e-3", |b| b.iter(|| integrate_quantum(black_box(&rep), &e, 0.1, 1e-3).unwrap()));
}

fn search(c: &mut Criterion) {
    let pair = hom_pair(2, 1).unwrap().to_f64();
    let cfg = SearchConfig { seeds: 4, ..Default::default() };
    let mut group = c.benchmark_group("search");
    group.sample_size(10);
    group.bench_function("hom(2,1) at (2|1), 4 seeds", |b| b.iter(|| find_representation(black_box(&pair), 2, 1, &cfg).unwrap()));
    group.finish();
}

criterion_group!(benches, algebra, dynamics, search);
criterion_main!(benches);
