use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use heiscurv_core::curvature::{curvature_exponent, McpConfig, RatioGrid, SweepConfig};
use heiscurv_core::{build_norm, Execution, NormSpec, TrigTable};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if Execution::is_parallel_available() {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn table() -> TrigTable {
    TrigTable::new(&build_norm(&NormSpec::Interpolated { q: 4.0, t: 0.5 }).unwrap(), 1024).unwrap()
}

fn sweep(c: &mut Criterion) {
    let t = table();
    let mut g = c.benchmark_group("curvature_exponent");
    g.sample_size(10).measurement_time(Duration::from_secs(20));
    for (name, execution) in modes() {
        let cfg = SweepConfig { execution, ..SweepConfig::coarse() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| curvature_exponent(&t, cfg).unwrap().n_curv)
        });
    }
    g.finish();
}

fn ratio_grid(c: &mut Criterion) {
    let t = table();
    let mut g = c.benchmark_group("ratio_grid");
    g.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, execution) in modes() {
        let cfg = McpConfig { n_phi: 64, n_omega: 128, execution, ..McpConfig::default() };
        g.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| RatioGrid::new(&t, cfg).unwrap().check(7.0).min_slack)
        });
    }
    g.finish();
}

criterion_group!(benches, sweep, ratio_grid);
criterion_main!(benches);
