use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;

use normext::onedim::oracle_scan;
use normext::vishik::green_check_batch;
use normext::{build_model, AtomGenerator, DiscreteModel, Execution, ModelVector, PowerSum, Slope, TailTerm};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn shifted(exec: Execution) -> DiscreteModel {
    let xi = ModelVector::from_tail(vec![TailTerm::power(1.0)]);
    build_model(AtomGenerator::shifted_real(Complex64::new(0.0, 1.0), PowerSum::index(), 0.5), xi)
        .unwrap()
        .with_execution(exec)
}

fn line(exec: Execution) -> DiscreteModel {
    let xi = ModelVector::from_tail(vec![TailTerm::power(1.0)]);
    build_model(AtomGenerator::line(Slope::Finite(2.0), 3.0, PowerSum::index(), 0.5), xi)
        .unwrap()
        .with_execution(exec)
}

fn moments(c: &mut Criterion) {
    let mut g = c.benchmark_group("moment");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            // fresh model each time so the moment cache does not hide the work
            b.iter_batched(|| shifted(exec), |m| m.moment(2, 0, 2.0, 1, 1e-13).unwrap(), criterion::BatchSize::SmallInput)
        });
    }
    g.finish();
}

fn scans(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_scan");
    g.sample_size(10);
    for (name, exec) in MODES {
        let m = line(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| oracle_scan(&m, 2_000, 1 << 14).unwrap()));
    }
    g.finish();
}

fn green(c: &mut Criterion) {
    let mut g = c.benchmark_group("green_batch");
    g.sample_size(10);
    for (name, exec) in MODES {
        let m = shifted(exec);
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| green_check_batch(&m, 50, 42).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, moments, scans, green);
criterion_main!(benches);
