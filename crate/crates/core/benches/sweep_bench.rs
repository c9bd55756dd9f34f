//! Parallel vs sequential throughput of the two data-parallel workloads:
//! drive-scenario sweeps and batched symplectic spectra.
//!
//! Run with `cargo bench -p rtq-core`. The parallel cases need the default
//! `parallel` feature; without it only the sequential baselines compile.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rtq_core::bogoliubov::{evolve_perturbative, random_symplectic_series};
use rtq_core::gaussian::{make_state, symplectic_eigenvalues, CovarianceMatrix};
use rtq_core::gw::{gw_transform, GWScenario};
use rtq_core::modes::{ModeSpec, ThermalParam};
use rtq_core::sweep;
use rtq_core::thermo::efficiency_general;

/// One full drive evaluation at dimensionless time tau.
fn drive_point(tau: f64) -> f64 {
    let scenario = GWScenario::new(1e-4, tau, (1, 2), 8, 10e-9, 1e-6, 1e-2).unwrap();
    let series = gw_transform(&scenario).unwrap();
    let part = scenario.partition();
    let vacuum = CovarianceMatrix::vacuum(8);
    let perturbed = evolve_perturbative(&vacuum, &series).unwrap();
    let xi = scenario.xi().unwrap();
    efficiency_general(&vacuum, &perturbed.assemble(), &part, xi)
        .unwrap()
        .eta
}

fn bench_drive_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("drive_sweep");
    let taus = sweep::grid(1.0, 100.0, 256, sweep::Scale::Log);
    group.bench_with_input(BenchmarkId::new("sequential", taus.len()), &taus, |b, taus| {
        b.iter(|| sweep::map_ordered_sequential(taus.len(), |i| drive_point(taus[i])))
    });
    #[cfg(feature = "parallel")]
    group.bench_with_input(BenchmarkId::new("parallel", taus.len()), &taus, |b, taus| {
        b.iter(|| sweep::map_ordered_parallel(taus.len(), |i| drive_point(taus[i])))
    });
    group.finish();
}

fn bench_symplectic_batch(c: &mut Criterion) {
    let n = 16;
    let spec = ModeSpec::new(n).unwrap();
    let states: Vec<CovarianceMatrix> = (0..64u64)
        .map(|seed| {
            let series = random_symplectic_series(seed, spec, 1e-2);
            let thermal = make_state(spec, ThermalParam::new(0.3).unwrap(), None).unwrap();
            rtq_core::bogoliubov::evolve(&thermal, &series.resummed(0.2)).unwrap()
        })
        .collect();
    let mut group = c.benchmark_group("symplectic_spectra");
    group.bench_with_input(
        BenchmarkId::new("sequential", states.len()),
        &states,
        |b, states| {
            b.iter(|| {
                sweep::map_ordered_sequential(states.len(), |i| {
                    symplectic_eigenvalues(&states[i]).unwrap().values()[0]
                })
            })
        },
    );
    #[cfg(feature = "parallel")]
    group.bench_with_input(
        BenchmarkId::new("parallel", states.len()),
        &states,
        |b, states| {
            b.iter(|| {
                sweep::map_ordered_parallel(states.len(), |i| {
                    symplectic_eigenvalues(&states[i]).unwrap().values()[0]
                })
            })
        },
    );
    group.finish();
}

criterion_group!(benches, bench_drive_sweep, bench_symplectic_batch);
criterion_main!(benches);
