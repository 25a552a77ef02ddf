//! Shared inputs for the kernel benchmarks.

use std::f64::consts::PI;

use unravel_core::{PhysicalParams, PovmSpec, TrajectoryConfig};

/// Dimensionless reference point (ω = 1, Γ_env = 0.1, Γ_fun = 0.01, η = 1).
pub fn natural() -> PhysicalParams {
    PhysicalParams::new(1.0, 0.1, 0.01, 1.0).expect("valid reference parameters")
}

/// Levitated-nanosphere parameters at efficiency `eta`.
pub fn lab(eta: f64) -> PhysicalParams {
    let omega_m = 2.0 * PI * 135e3;
    PhysicalParams::new(omega_m, 2.0 * PI * 11e3, 1e-5 * omega_m, eta).expect("valid lab parameters")
}

/// `n × n` grid over `η ∈ [0.05, 1]` and `Γ_fun/Γ_env ∈ [0.02, 1]`.
pub fn efficiency_ratio_grid(n: usize) -> Vec<PhysicalParams> {
    let base = natural();
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * i as f64 / (n - 1) as f64;
    (0..n)
        .flat_map(|i| (0..n).map(move |j| (step(0.05, 1.0, i), step(0.02, 1.0, j))))
        .map(|(eta, r)| base.with_eta(eta).with_gamma_fun(r * base.gamma_env))
        .collect()
}

pub fn reference_povm() -> PovmSpec {
    PovmSpec::optimal_at_zero_collapse(&natural()).expect("pure reference state")
}

/// `n_traj` trajectories over 2 µs at the default step.
pub fn short_ensemble(n_traj: usize) -> TrajectoryConfig {
    let p = lab(1.0);
    let dt = unravel_core::dynamics::default_dt(p.omega_m);
    let n_steps = (2e-6 / dt).round() as usize;
    let mut cfg = TrajectoryConfig::new(dt, n_steps, n_traj, 7);
    cfg.sample_every = n_steps;
    cfg
}
