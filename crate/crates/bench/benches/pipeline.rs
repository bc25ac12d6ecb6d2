use std::hint::black_box;

use cellres_bench::Workload;
use cellres_core::association::Mode;
use cellres_core::metrics::{coverage_raster, evaluate, RasterSeries, RunContext};
use cellres_core::scenarios::{draw_users, run_scenario, FailureModel, ScenarioSpec};
use cellres_core::seed;
use criterion::{criterion_group, criterion_main, Criterion};

fn single_run(c: &mut Criterion) {
    let mut group = c.benchmark_group("evaluate");
    for side in [3000.0, 6000.0] {
        let w = Workload::new(side, 1000.0, 400.0, 7);
        let run_seed = seed::run_seed(7, 0);
        let users = draw_users(&w.plan, 0.0, run_seed).unwrap();
        let ctx = RunContext {
            users: &users,
            operators: w.network.operators(),
            model: &w.model,
            run_seed,
        };
        let label = format!("{}km_{}users", side / 1000.0, users.len());
        group.bench_function(label, |b| {
            b.iter(|| evaluate(black_box(w.network.cells()), &ctx, &[Mode::PerOperator, Mode::Roaming]).unwrap())
        });
    }
    group.finish();
}

fn scenario(c: &mut Criterion) {
    let w = Workload::new(4000.0, 1000.0, 400.0, 3);
    let spec = ScenarioSpec {
        failure: FailureModel::Isolated { p_iso: 0.1 },
        runs: 10,
        seed: 3,
        ..ScenarioSpec::default()
    };
    let mut group = c.benchmark_group("run_scenario");
    group.sample_size(10);
    group.bench_function("4km_10runs_isolated", |b| {
        b.iter(|| run_scenario(&spec, &w.network, &w.plan, &w.model).unwrap())
    });
    group.finish();
}

fn coverage(c: &mut Criterion) {
    let w = Workload::new(2000.0, 1000.0, 400.0, 5);
    let mut group = c.benchmark_group("coverage");
    group.sample_size(10);
    group.bench_function("2km_roaming", |b| {
        b.iter(|| {
            coverage_raster(
                w.network.region(),
                w.network.cells(),
                RasterSeries::Roaming,
                &w.model,
                5,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, single_run, scenario, coverage);
criterion_main!(benches);
