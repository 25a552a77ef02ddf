use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use unravel_bench::{efficiency_ratio_grid, lab, natural, reference_povm, short_ensemble};
use unravel_core::dynamics::default_dt;
use unravel_core::estimation::qfi_time_series;
use unravel_core::{
    dcov_steady, integrate_riccati, povm_fi, qfi_gaussian, qfi_steady_closed, simulate, steady_state_analytic,
    GaussianState, Sym2,
};

fn steady_state(c: &mut Criterion) {
    let p = natural();
    c.bench_function("steady_state_analytic", |b| {
        b.iter(|| steady_state_analytic(black_box(&p)))
    });
    c.bench_function("qfi_steady_closed", |b| b.iter(|| qfi_steady_closed(black_box(&p))));
    c.bench_function("qfi_gaussian_steady", |b| {
        b.iter(|| {
            let s = steady_state_analytic(black_box(&p)).unwrap();
            let ds = dcov_steady(&p).unwrap();
            qfi_gaussian(&s, &ds)
        })
    });
}

fn povm_grid(c: &mut Criterion) {
    let grid = efficiency_ratio_grid(50);
    let spec = reference_povm();
    c.bench_function("povm_fi_grid_50x50", |b| {
        b.iter(|| grid.iter().map(|p| povm_fi(p, &spec).unwrap()).sum::<f64>())
    });
}

fn riccati(c: &mut Criterion) {
    let p = natural();
    let dt = default_dt(p.omega_m);
    let mut group = c.benchmark_group("integrate_riccati");
    for periods in [1.0, 10.0] {
        let t = periods * 2.0 * std::f64::consts::PI;
        group.bench_with_input(BenchmarkId::from_parameter(periods), &t, |b, &t| {
            b.iter(|| integrate_riccati(&Sym2::thermal(10.0), black_box(&p), t, dt))
        });
    }
    group.finish();
}

fn finite_time_qfi(c: &mut Criterion) {
    let p = lab(1.0);
    let dt = default_dt(p.omega_m);
    let n_steps = (150e-6 / dt).round() as usize;
    c.bench_function("qfi_time_series_150us", |b| {
        b.iter(|| qfi_time_series(black_box(&p), 100.0, dt, n_steps, 68))
    });
}

fn trajectories(c: &mut Criterion) {
    let p = lab(1.0);
    let state0 = GaussianState::thermal(100.0).unwrap();
    let cfg = short_ensemble(1000);
    let mut group = c.benchmark_group("simulate");
    group.sample_size(20);
    group.bench_function("1000_traj_2us", |b| b.iter(|| simulate(black_box(&p), &state0, &cfg)));
    group.finish();
}

criterion_group!(benches, steady_state, povm_grid, riccati, finite_time_qfi, trajectories);
criterion_main!(benches);
