use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use limsup_core::counting::PsiTable;
use limsup_core::functions::FunctionForm;
use limsup_core::geodesics::{excursions, loglaw_statistic, quotient_frequencies, Direction};
use limsup_core::horoballs::{count_horoballs, disjointness_check};
use limsup_core::intervals::frac;
use limsup_core::systems::{stage_measure, MeasureOptions, RadiusRule, ResonantSystem, StageSpec};

fn psi(text: &str) -> limsup_core::systems::RadiusFn {
    FunctionForm::parse(text).unwrap().into()
}

fn stage_measures(c: &mut Criterion) {
    let mut group = c.benchmark_group("stage_measure");
    group.sample_size(10);
    for n in [8u32, 12, 16] {
        let spec = StageSpec::new(ResonantSystem::rationals(), RadiusRule::PerPoint(psi("r^-3")), 2, n).unwrap();
        group.bench_with_input(BenchmarkId::new("rationals_cubic", n), &spec, |b, spec| {
            b.iter(|| stage_measure(black_box(spec), MeasureOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn counting(c: &mut Criterion) {
    let table = PsiTable::new(&psi("1/4 * r^-1"), 100_000).unwrap();
    c.bench_function("count_r/n=1e5", |b| b.iter(|| table.count(black_box(0.413_2))));
}

fn horoballs(c: &mut Criterion) {
    c.bench_function("count_horoballs/R=1e-6", |b| {
        b.iter(|| count_horoballs(frac(0, 1), frac(1, 1), frac(1, 4_000_000), frac(1, 1_000_000), u128::MAX).unwrap())
    });
    let mut group = c.benchmark_group("ford_disjointness");
    group.sample_size(10);
    group.bench_function("q_max=100", |b| b.iter(|| disjointness_check(black_box(100)).unwrap()));
    group.finish();
}

fn geodesics(c: &mut Criterion) {
    let mut group = c.benchmark_group("geodesics");
    group.sample_size(10);
    group.bench_function("quotient_frequencies/1000x1000", |b| b.iter(|| quotient_frequencies(7, 1000, 1000, 3)));
    let planted = Direction::planted(20, 1_000_000).unwrap();
    group.bench_function("excursions/T=120", |b| b.iter(|| excursions(&planted, 120.0, 1e-3).unwrap()));
    let golden = Direction::golden();
    group.bench_function("loglaw/golden/T=1e3", |b| b.iter(|| loglaw_statistic(&golden, 1e3, 0.0, 1e-2).unwrap()));
    group.finish();
}

criterion_group!(benches, stage_measures, counting, horoballs, geodesics);
criterion_main!(benches);
