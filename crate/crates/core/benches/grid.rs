//! Sequential against parallel execution of the two grid-shaped workloads:
//! the direction fan of a seam check and the `y` grid of a decay measurement.

use std::hint::black_box;

use bglue::geometry::expr::{c, var};
use bglue::geometry::MapExpr;
use bglue::glue::GluedAction;
use bglue::heisenberg::Gen;
use bglue::par::Execution;
use bglue::verify::{measure_flatness, verify_cr_at_seam, DecayConfig, SeamCheckConfig};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const BITS: usize = 128;

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn seam_fan(cr: &mut Criterion) {
    let act = GluedAction::disk_annulus(None, BITS).unwrap();
    let x = act.generator(Gen::X);
    let mut group = cr.benchmark_group("seam_check");
    group.sample_size(10);
    for (name, execution) in modes() {
        let cfg = SeamCheckConfig { max_order: 2, execution, ..SeamCheckConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| verify_cr_at_seam(black_box(x), 0, 0.4, cfg, BITS).unwrap())
        });
    }
    group.finish();
}

fn decay_grid(cr: &mut Criterion) {
    let g = MapExpr::CollarGerm { tangential: vec![var(0)], factor: c(2.0) };
    let mut group = cr.benchmark_group("decay_grid");
    group.sample_size(10);
    for (name, execution) in modes() {
        let cfg = DecayConfig { points: 48, execution, ..DecayConfig::default() };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| measure_flatness(black_box(&g), cfg, 256).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, seam_fan, decay_grid);
criterion_main!(benches);
