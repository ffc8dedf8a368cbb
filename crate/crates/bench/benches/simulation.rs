use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ulocal_core::lti::library;
use ulocal_core::{discretize_zoh, run_closed_loop, suite, trace_io, DerivativeEstimator};

fn shipped(stem: &str) -> ulocal_core::Scenario {
    suite::scenarios("paper")
        .unwrap()
        .into_iter()
        .find(|s| s.stem == stem)
        .unwrap()
        .file
        .to_scenario()
        .unwrap()
}

fn plant(c: &mut Criterion) {
    let m = library::sigma1();
    c.bench_function("discretize sigma1", |b| b.iter(|| discretize_zoh(black_box(&m), 1e-6).unwrap()));
    let mut p = discretize_zoh(&m, 1e-6).unwrap();
    c.bench_function("plant step", |b| b.iter(|| p.step(black_box(0.5)).unwrap()));
    let mut est = DerivativeEstimator::new(1e-6, 2, 0.0).unwrap();
    let mut y = 0.0;
    c.bench_function("derivative push", |b| {
        b.iter(|| {
            y += 1e-3;
            est.push(black_box(y)).unwrap()
        })
    });
}

fn loops(c: &mut Criterion) {
    let fig3 = shipped("fig3");
    c.bench_function("closed loop fig3 (10k ticks)", |b| {
        b.iter(|| run_closed_loop(black_box(&fig3)).unwrap())
    });
    let a1 = shipped("a1_ipi");
    c.bench_function("closed loop a1_ipi (3k ticks)", |b| {
        b.iter(|| run_closed_loop(black_box(&a1)).unwrap())
    });
    let rows = run_closed_loop(&fig3).unwrap().rows;
    c.bench_function("csv write fig3", |b| b.iter(|| trace_io::csv_string(black_box(&rows))));
    let all: Vec<_> =
        suite::scenarios("paper").unwrap().into_iter().map(|s| s.file.to_scenario().unwrap()).collect();
    let mut g = c.benchmark_group("suite");
    g.sample_size(10);
    g.bench_function("paper suite", |b| {
        b.iter(|| all.iter().map(|sc| run_closed_loop(sc).unwrap().rows.len()).sum::<usize>())
    });
    g.finish();
}

criterion_group!(benches, plant, loops);
criterion_main!(benches);
