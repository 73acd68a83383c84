use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lensgeo::oracle::{brute_force_distance, OracleGrid};
use lensgeo::{distance_from_id, exp_map, lens_distance, plan, Covector, SpherePose};
use lensgeo_bench::targets;

fn forward(c: &mut Criterion) {
    let cov = Covector::new(0.7, -1.3);
    c.bench_function("exp_map", |b| b.iter(|| exp_map(black_box(&cov), black_box(2.2))));
}

fn inverse(c: &mut Criterion) {
    let gs = targets(11, 64);
    c.bench_function("distance_from_id/64", |b| {
        b.iter(|| gs.iter().map(|g| distance_from_id(g).unwrap()).sum::<f64>())
    });
    let ps: Vec<_> = targets(12, 16).into_iter().map(|g| lensgeo::canonicalize(&g)).collect();
    c.bench_function("lens_distance/15", |b| {
        b.iter(|| ps.windows(2).map(|w| lens_distance(&w[0], &w[1]).unwrap()).sum::<f64>())
    });
}

fn oracle(c: &mut Criterion) {
    let g = targets(13, 1)[0];
    let grid = OracleGrid::with_counts(32, 33, 64);
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("brute_force/32x33x64", |b| {
        b.iter(|| brute_force_distance(black_box(&g), &grid).ok())
    });
    group.finish();
}

fn planner(c: &mut Criterion) {
    let from = SpherePose::new(1.2, 0.3, 0.1).unwrap();
    let to = SpherePose::new(2.0, 2.5, 1.4).unwrap();
    let mut group = c.benchmark_group("plan");
    group.sample_size(20);
    group.bench_function("default", |b| b.iter(|| plan(black_box(&from), black_box(&to)).unwrap()));
    group.finish();
}

criterion_group!(benches, forward, inverse, oracle, planner);
criterion_main!(benches);
