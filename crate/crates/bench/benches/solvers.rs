use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use thinlayer_bench::{circle, ellipse, smooth_data, unit_circle_data};
use thinlayer_cli::{run_converge, StudyConfig};
use thinlayer_core::expansion::{expand_thm1, expand_thm2};
use thinlayer_core::inner::NystromOperator;
use thinlayer_core::oracle::solve_disk_p1;
use thinlayer_core::{Complex64, ExpansionOptions};

fn nystrom(c: &mut Criterion) {
    let curve = ellipse();
    let mut group = c.benchmark_group("nystrom_build");
    for nodes in [64, 128, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(nodes), &nodes, |b, &n| {
            b.iter(|| NystromOperator::new(black_box(&curve), n).unwrap())
        });
    }
    group.finish();
}

fn expansion(c: &mut Criterion) {
    let opts = ExpansionOptions::default();
    let i = Complex64::new(0.0, 1.0);
    let f = unit_circle_data();
    c.bench_function("thm1_circle_n4", |b| {
        b.iter(|| expand_thm1(circle(), black_box(&f), i, 4, &opts).unwrap())
    });
    let g = smooth_data(ellipse().period());
    c.bench_function("thm2_q2_ellipse_n2", |b| {
        b.iter(|| expand_thm2(ellipse(), black_box(&g), i, 2, 2, &opts).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let f = unit_circle_data();
    c.bench_function("disk_p1", |b| {
        b.iter(|| solve_disk_p1(black_box(2f64.powi(-5)), Complex64::new(0.0, 1.0), &f).unwrap())
    });
}

fn converge(c: &mut Criterion) {
    let mut cfg = StudyConfig::default();
    cfg.set("orders", "0,1,2").unwrap();
    cfg.set("data", "1:1,3:0.3").unwrap();
    c.bench_function("converge_thm1_n012", |b| {
        b.iter(|| run_converge(black_box(&cfg)).unwrap())
    });
}

criterion_group!(benches, nystrom, expansion, oracle, converge);
criterion_main!(benches);
