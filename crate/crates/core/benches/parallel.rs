use criterion::{criterion_group, criterion_main, Criterion};
use lowthrust_core::model::{GravityModel, OrbitState, TransferProblem};
use lowthrust_core::sensitivity::{estimate_costates, estimate_costates_seq, SensitivityOptions};
use lowthrust_core::ses::{scan_raan_branches, scan_raan_branches_seq, SesOptions};
use lowthrust_core::units::{days_to_seconds, deg_to_rad};

fn reference_problem() -> TransferProblem {
    let earth = GravityModel::earth();
    let start = OrbitState::from_altitude(&earth, 800e3, deg_to_rad(98.0), 0.0, 0.0).unwrap();
    let target = OrbitState::from_altitude(&earth, 900e3, deg_to_rad(99.0), deg_to_rad(30.0), 0.0)
        .unwrap()
        .coasted_to(&earth, days_to_seconds(100.0));
    TransferProblem::new(start, target, 3.5e-3, earth).unwrap()
}

fn bench_branch_scan(c: &mut Criterion) {
    let problem = reference_problem();
    let options = SesOptions::default();
    let mut group = c.benchmark_group("branch_scan");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| scan_raan_branches(&problem, -2..=2, &options))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| scan_raan_branches_seq(&problem, -2..=2, &options))
    });
    group.finish();
}

fn bench_costate_estimate(c: &mut Criterion) {
    let problem = reference_problem();
    let options = SensitivityOptions::default();
    let mut group = c.benchmark_group("costate_estimate");
    group.sample_size(20);
    group.bench_function("parallel", |b| {
        b.iter(|| estimate_costates(&problem, &options).unwrap())
    });
    group.bench_function("sequential", |b| {
        b.iter(|| estimate_costates_seq(&problem, &options).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_branch_scan, bench_costate_estimate);
criterion_main!(benches);
