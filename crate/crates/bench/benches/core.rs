
use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use damrl_core::ageing::classify_all_unchecked;
use damrl_core::theorems::catalog::{load_catalog, verify_entries};
use damrl_core::theorems::Analysis;
use damrl_core::{compose, hazard_star, CovariateFunction, LifetimeModel, PiecewiseExpr, Settings, SpecKind};

fn expr(c: &mut Criterion) {
    let src = "(1+t)^2 on [0,1); 4*t on [1,inf)";
    c.bench_function("parse piecewise", |b| b.iter(|| PiecewiseExpr::parse(black_box(src)).unwrap()));
    let f = PiecewiseExpr::parse("exp(-(t+1))*ln(2+t)/(1+t^2)").unwrap();
    c.bench_function("eval", |b| b.iter(|| f.eval(black_box(1.7)).unwrap()));
}

fn lifetime(c: &mut Criterion) {
    // Building the table dominates the first call, so rebuild every iteration.
    c.bench_function("hazard model: build table and mrl", |b| {
        b.iter(|| {
            let m = LifetimeModel::parse(SpecKind::Hazard, "2/(1+t) on [0,1); 1 on [1,inf)", "ex2").unwrap();
            m.mrl_of(black_box(3.0)).unwrap()
        })
    });
    let m = LifetimeModel::parse(SpecKind::Hazard, "3/(1+t)", "heavy").unwrap();
    m.mrl_of(0.0).unwrap();
    c.bench_function("mrl lookup past the table", |b| b.iter(|| m.mrl_of(black_box(2e4)).unwrap()));
}

fn analysis(c: &mut Criterion) {
    let s = Settings::default();
    let cm = compose(
        Arc::new(LifetimeModel::exponential()),
        CovariateFunction::parse("exp(-t)").unwrap(),
        &s,
        false,
    )
    .unwrap();
    c.bench_function("hazard_star", |b| b.iter(|| hazard_star(&cm, black_box(2.5)).unwrap()));
    let pinned = cm.pinned(&s);
    let grid = cm.grid(&pinned).unwrap();
    c.bench_function("classify all classes", |b| {
        b.iter(|| classify_all_unchecked(cm.star(), &grid, &pinned).unwrap())
    });
    c.bench_function("all theorem reports", |b| b.iter(|| Analysis::new(&cm, &s).unwrap().reports().unwrap()));
}

fn catalog(c: &mut Criterion) {
    let entries = load_catalog();
    let s = Settings::default();
    let mut g = c.benchmark_group("catalog");
    g.sample_size(10);
    g.bench_function("verify", |b| b.iter(|| verify_entries(&entries, &s).unwrap()));
    g.finish();
}

criterion_group!(benches, expr, lifetime, analysis, catalog);
criterion_main!(benches);
