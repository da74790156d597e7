use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinlab::readout::{flip_error_sweep, Acquisition, Tomography};
use spinlab::sequence::{labeled_epr_preparation, RunOptions, Simulator};
use spinlab::spin::{thermal_state, Polarization, SpinSystem};
use spinlab::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn tomography(c: &mut Criterion) {
    let sys = SpinSystem::bromotrifluoroethylene();
    let sim = Simulator::ideal(&sys).unwrap();
    let rho0 = thermal_state(&sys, &Polarization::Homonuclear(1e-5)).unwrap();
    let (rho, frame) = sim.run_to_end(&rho0, &labeled_epr_preparation(&sys).unwrap()).unwrap();
    let tomo = Tomography::new(&sys, &frame, &Acquisition::default()).unwrap();
    let mut group = c.benchmark_group("tomography");
    group.sample_size(20);
    for (name, exec) in MODES {
        let t = tomo.clone().with_execution(exec);
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| t.measure(black_box(&rho)).unwrap()));
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let sys = SpinSystem::bromotrifluoroethylene();
    let rho0 = thermal_state(&sys, &Polarization::Homonuclear(1e-5)).unwrap();
    let prep = labeled_epr_preparation(&sys).unwrap();
    let acq = Acquisition::new(1.0, 1e-3).unwrap();
    let eps: Vec<f64> = (0..8).map(|i| i as f64 * 0.005).collect();
    let mut group = c.benchmark_group("flip_error_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| flip_error_sweep(&sys, RunOptions::ideal(), &rho0, &prep, black_box(&eps), &acq, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, tomography, sweep);
criterion_main!(benches);
