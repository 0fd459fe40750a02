//! End-to-end benchmarks: full scenario runs and the scheme comparison.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use ibesim_core::flows::{check_expectations, compare_all, FlowSizes};
use ibesim_core::{run_scenario, Config};

fn scenario_benches(c: &mut Criterion) {
    let config = Config::builtin_default();

    c.bench_function("scenario_attach_warm", |b| {
        b.iter(|| run_scenario(black_box("attach-warm"), &config, black_box(7)).unwrap())
    });

    c.bench_function("scenario_attach_cold", |b| {
        b.iter(|| run_scenario(black_box("attach-cold"), &config, black_box(7)).unwrap())
    });

    c.bench_function("scenario_aic_attack", |b| {
        b.iter(|| run_scenario(black_box("aic-attack"), &config, black_box(7)).unwrap())
    });

    c.bench_function("compare_all_schemes", |b| {
        let sizes = FlowSizes::default();
        b.iter(|| {
            let rows = compare_all(black_box(&sizes));
            check_expectations(&rows)
        })
    });
}

criterion_group!(benches, scenario_benches);
criterion_main!(benches);
