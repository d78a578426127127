use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use glueprint_bench::*;
use glueprint_core::rational::qi;
use glueprint_core::seifert_arithmetic::{distortion_budget, enumerate_targets};
use glueprint_core::shearing_enumerator::DEFAULT_CELL_CAP;
use glueprint_core::torus_mapping_class::double_coset_reps;
use glueprint_core::{distortion_report, entire_cover, enumerate_gluings, DominationBudget};

fn cosets(c: &mut Criterion) {
    let mut g = c.benchmark_group("double_cosets");
    for (name, q, qp) in form_pairs() {
        g.bench_with_input(BenchmarkId::new(name, 12), &(q, qp), |b, (q, qp)| {
            b.iter(|| double_coset_reps(black_box(q), black_box(qp), &qi(12)).unwrap())
        });
    }
    g.finish();
}

fn distortion(c: &mut Criterion) {
    let (pg, phi) = twist_edge();
    c.bench_function("distortion/twist_edge", |b| {
        b.iter(|| distortion_report(black_box(&pg), black_box(&phi)).unwrap())
    });
    let (pg, phi) = semi_vertex();
    c.bench_function("distortion/semi_vertex", |b| {
        b.iter(|| distortion_report(black_box(&pg), black_box(&phi)).unwrap())
    });
    c.bench_function("cover/semi_vertex", |b| {
        b.iter(|| entire_cover(black_box(&pg), black_box(&phi), None).unwrap())
    });
}

fn gluings(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_gluings");
    g.sample_size(20);
    for (name, pg, budget) in sweeps() {
        g.bench_function(name, |b| {
            b.iter(|| enumerate_gluings(black_box(&pg), &budget, DEFAULT_CELL_CAP).unwrap())
        });
    }
    g.finish();
}

fn seifert(c: &mut Criterion) {
    c.bench_function("budget/default", |b| {
        b.iter(|| distortion_budget(black_box(&DominationBudget::default())).unwrap())
    });
    let budget = target_budget();
    let mut g = c.benchmark_group("targets");
    g.sample_size(10);
    g.bench_function("t6", |b| {
        b.iter(|| enumerate_targets(black_box(&budget), 10_000_000).unwrap())
    });
    g.finish();
}

criterion_group!(benches, cosets, distortion, gluings, seifert);
criterion_main!(benches);
