use std::hint::black_box;
use std::sync::Arc;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dunkl_bench::{context, dense_homogeneous, systems};
use dunkl_core::{HeatModel, HermiteSystem, Kernel, OrbitKernel, TestFunction};

fn dunkl_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("dunkl_apply");
    for (name, spec) in systems() {
        let ctx = context(&spec).unwrap();
        let p = dense_homogeneous(ctx.dim(), 8);
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| ctx.dunkl_apply(0, black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn hermite_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("hermite_build");
    group.sample_size(10).measurement_time(Duration::from_secs(10));
    for (name, spec) in systems() {
        let ctx = context(&spec).unwrap();
        group.bench_function(BenchmarkId::new(name, 6), |b| {
            b.iter(|| HermiteSystem::build(ctx.clone(), black_box(6)).unwrap())
        });
    }
    group.finish();
}

fn kernel_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("kernel_eval");
    for (name, spec) in systems() {
        let system = Arc::new(spec.build().unwrap());
        let dim = system.dim();
        let kernel = OrbitKernel::new(system);
        let x: Vec<f64> = (0..dim).map(|i| 0.8 - 0.3 * i as f64).collect();
        let y: Vec<f64> = (0..dim).map(|i| -0.5 + 0.4 * i as f64).collect();
        group.bench_function(BenchmarkId::new(name, "dd"), |b| {
            b.iter(|| kernel.eval_real(black_box(&x), black_box(&y), 1e-16))
        });
        group.bench_function(BenchmarkId::new(name, "f64"), |b| {
            b.iter(|| kernel.eval_f64(black_box(&x), black_box(&y), 1e-16))
        });
    }
    group.finish();
}

fn heat_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("heat_solve");
    group.sample_size(10);
    let f = TestFunction::gaussian(1.0);
    for (name, spec) in systems() {
        let system = Arc::new(spec.build().unwrap());
        let dim = system.dim();
        let model = HeatModel::new(system, dunkl_core::suite::default_points(dim)).unwrap();
        let x = vec![0.4; dim];
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| model.heat_solve(&f, black_box(&x), 0.5).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, dunkl_apply, hermite_build, kernel_eval, heat_solve);
criterion_main!(benches);
