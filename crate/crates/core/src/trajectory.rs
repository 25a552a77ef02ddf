//! Monte-Carlo trajectories of the conditional first moments.
//!
//! The covariance path is deterministic and computed once per run. The mean
//! follows `d⟨r⟩ = A⟨r⟩dt − σB dw` with `{dw, dwᵀ} = 𝟙 dt`, i.e. each Wiener
//! component has variance `dt/2`.
//!
//! Discretization: the drift is propagated exactly (`A` generates a rotation)
//! and the diffusion coefficient is the trapezoidal average of the rotated
//! left-point and the right-point `σB`. With a deterministic, rapidly
//! relaxing `σ(t)` (a hot initial state collapses within a few steps) the
//! left-point rule visibly biases the ensemble second moments; the
//! trapezoidal coefficient removes that bias to the level of the
//! Monte-Carlo error.
//!
//! Trajectory `i` draws its noise from ChaCha8 stream `i` of the run seed,
//! so results do not depend on scheduling or thread count.

use nalgebra::{Matrix2, Vector2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::dynamics::{build_matrices, check_step, lyapunov_path, riccati_path};
use crate::error::{Error, Result};
use crate::gaussian::{ensure_physical, CovMat, GaussianState, Sym2};
use crate::params::PhysicalParams;

/// Hard cap on stored samples (`n_traj × n_samples`).
pub const MAX_STORED_SAMPLES: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub n_traj: usize,
    pub seed: u64,
    /// Apply the mean-cancelling displacement after every step.
    pub feedback: bool,
    /// Keep the measurement record.
    pub record_output: bool,
    /// Store every `sample_every`-th step (the last step is always stored).
    pub sample_every: usize,
}

impl TrajectoryConfig {
    pub fn new(dt: f64, n_steps: usize, n_traj: usize, seed: u64) -> Self {
        Self {
            dt,
            n_steps,
            n_traj,
            seed,
            feedback: false,
            record_output: false,
            sample_every: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", format!("must be finite and > 0, got {}", self.dt)));
        }
        if self.n_steps == 0 {
            return Err(Error::param("n_steps", "must be >= 1"));
        }
        if self.n_traj == 0 {
            return Err(Error::param("n_traj", "must be >= 1"));
        }
        if self.sample_every == 0 {
            return Err(Error::param("sample_every", "must be >= 1"));
        }
        Ok(())
    }

    /// Integration steps at which a sample is stored.
    pub fn sample_steps(&self) -> Vec<usize> {
        let mut steps: Vec<usize> = (0..=self.n_steps).step_by(self.sample_every).collect();
        if *steps.last().unwrap() != self.n_steps {
            steps.push(self.n_steps);
        }
        steps
    }
}

/// Noise source for [`simulate_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    Wiener,
    /// All increments zero; leaves the deterministic drift only.
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub dt: f64,
    pub n_traj: usize,
    /// Integration step index of every stored sample.
    pub sample_steps: Vec<usize>,
    /// Shared conditional covariance at every stored sample.
    pub cov_path: Vec<CovMat>,
    means: Vec<Vector2<f64>>,
    record: Option<Vec<Vector2<f64>>>,
}

impl TrajectoryResult {
    pub fn n_samples(&self) -> usize {
        self.sample_steps.len()
    }

    pub fn time(&self, sample: usize) -> f64 {
        self.sample_steps[sample] as f64 * self.dt
    }

    /// Mean trajectory `i`, one entry per stored sample.
    pub fn means(&self, traj: usize) -> &[Vector2<f64>] {
        let n = self.n_samples();
        &self.means[traj * n..(traj + 1) * n]
    }

    /// Record increments of trajectory `i`: entry `k` is the output
    /// integrated over the interval ending at sample `k` (zero at `k = 0`).
    pub fn record(&self, traj: usize) -> Option<&[Vector2<f64>]> {
        let n = self.n_samples();
        self.record.as_ref().map(|r| &r[traj * n..(traj + 1) * n])
    }

    /// Largest `‖⟨r⟩‖` over all trajectories and samples.
    pub fn max_mean_norm(&self) -> f64 {
        self.means.iter().map(|m| m.norm()).fold(0.0, f64::max)
    }
}

/// Simulates `cfg.n_traj` independent trajectories.
pub fn simulate(p: &PhysicalParams, state0: &GaussianState, cfg: &TrajectoryConfig) -> Result<TrajectoryResult> {
    simulate_with(p, state0, cfg, Noise::Wiener)
}

pub fn simulate_with(
    p: &PhysicalParams,
    state0: &GaussianState,
    cfg: &TrajectoryConfig,
    noise: Noise,
) -> Result<TrajectoryResult> {
    cfg.validate()?;
    p.validate()?;
    check_step(cfg.dt, p.omega_m)?;
    ensure_physical(&state0.cov)?;

    let sample_steps = cfg.sample_steps();
    let n_samples = sample_steps.len();
    let stored = cfg
        .n_traj
        .checked_mul(n_samples)
        .filter(|&n| n <= MAX_STORED_SAMPLES)
        .ok_or_else(|| {
            Error::Overflow(format!(
                "{} trajectories x {} samples exceeds {}",
                cfg.n_traj, n_samples, MAX_STORED_SAMPLES
            ))
        })?;
    if cfg.n_steps >= MAX_STORED_SAMPLES {
        return Err(Error::Overflow(format!("{} steps", cfg.n_steps)));
    }

    let m = build_matrices(p)?;
    let b = m.b[(0, 1)];
    let path = riccati_path(&state0.cov, p, cfg.dt, cfg.n_steps)?;
    let (sin, cos) = (p.omega_m * cfg.dt).sin_cos();
    let rot = Matrix2::new(cos, sin, -sin, cos);

    // σB has a single non-zero column b·(σ_xx, σ_xp); the mean only feels dw₂.
    let gains: Vec<Vector2<f64>> = path
        .windows(2)
        .map(|w| {
            let left = rot * Vector2::new(w[0].xx, w[0].xp);
            let right = Vector2::new(w[1].xx, w[1].xp);
            (left + right) * (0.5 * b)
        })
        .collect();
    let noise_scale = match noise {
        Noise::Wiener => (0.5 * cfg.dt).sqrt(),
        Noise::Off => 0.0,
    };

    let run_one = |traj: usize| -> (Vec<Vector2<f64>>, Vec<Vector2<f64>>) {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(traj as u64);
        let mut r = state0.mean;
        let mut means = Vec::with_capacity(n_samples);
        let mut record = Vec::with_capacity(if cfg.record_output { n_samples } else { 0 });
        let mut acc = Vector2::zeros();
        means.push(r);
        if cfg.record_output {
            record.push(acc);
        }
        let mut next_sample = 1;
        for (step, gain) in gains.iter().enumerate() {
            let z1: f64 = StandardNormal.sample(&mut rng);
            let z2: f64 = StandardNormal.sample(&mut rng);
            let dw = Vector2::new(z1, z2) * noise_scale;
            if cfg.record_output {
                // dy = Bᵀ⟨r⟩ dt − dw, so that dw is the innovation.
                acc += Vector2::new(0.0, b * r.x * cfg.dt) - dw;
            }
            r = rot * r - gain * dw.y;
            if cfg.feedback {
                r = Vector2::zeros();
            }
            if next_sample < n_samples && sample_steps[next_sample] == step + 1 {
                means.push(r);
                if cfg.record_output {
                    record.push(acc);
                    acc = Vector2::zeros();
                }
                next_sample += 1;
            }
        }
        (means, record)
    };

    let per_traj: Vec<_> = (0..cfg.n_traj).into_par_iter().map(run_one).collect();
    let mut means = Vec::with_capacity(stored);
    let mut record = cfg.record_output.then(|| Vec::with_capacity(stored));
    for (m, rec) in per_traj {
        means.extend(m);
        if let Some(r) = record.as_mut() {
            r.extend(rec);
        }
    }

    Ok(TrajectoryResult {
        dt: cfg.dt,
        n_traj: cfg.n_traj,
        cov_path: sample_steps.iter().map(|&s| path[s]).collect(),
        sample_steps,
        means,
        record,
    })
}

/// Ensemble statistics of the conditional means at one stored sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleMoments {
    pub mean: Vector2<f64>,
    /// Sample average of `⟨r⟩⟨r⟩ᵀ`.
    pub second: Sym2,
    /// Standard errors (NaN for a single trajectory).
    pub mean_se: Vector2<f64>,
    pub second_se: Sym2,
}

pub fn ensemble_moments(result: &TrajectoryResult, sample: usize) -> Result<EnsembleMoments> {
    let len = result.n_samples();
    if sample >= len {
        return Err(Error::OutOfRange { index: sample, len });
    }
    let n = result.n_traj as f64;
    let at = |i: usize| result.means[i * len + sample];
    let outer = |r: Vector2<f64>| Sym2::new(r.x * r.x, r.x * r.y, r.y * r.y);

    let mut mean = Vector2::zeros();
    let mut second = Sym2::ZERO;
    for i in 0..result.n_traj {
        mean += at(i);
        second = second + outer(at(i));
    }
    mean /= n;
    second = second * (1.0 / n);

    let mut var_mean = Vector2::zeros();
    let mut var_second = Sym2::ZERO;
    for i in 0..result.n_traj {
        let d = at(i) - mean;
        var_mean += d.component_mul(&d);
        let o = outer(at(i)) - second;
        var_second = var_second + Sym2::new(o.xx * o.xx, o.xp * o.xp, o.pp * o.pp);
    }
    let denom = (n - 1.0) * n;
    let sqrt = |v: f64| {
        if result.n_traj > 1 {
            (v / denom).sqrt()
        } else {
            f64::NAN
        }
    };
    Ok(EnsembleMoments {
        mean,
        second,
        mean_se: var_mean.map(sqrt),
        second_se: Sym2::new(sqrt(var_second.xx), sqrt(var_second.xp), sqrt(var_second.pp)),
    })
}

/// Comparison of the conditional decomposition with the unconditional
/// second moments at one stored sample.
///
/// In the anticommutator convention the unconditional covariance splits as
/// `Σ = σ + 2 E[⟨r⟩⟨r⟩ᵀ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalVarianceCheck {
    pub t: f64,
    pub predicted: Sym2,
    pub observed: Sym2,
    /// `(observed − predicted) / standard error`, per entry.
    pub z: Sym2,
}

impl TotalVarianceCheck {
    pub fn max_abs_z(&self) -> f64 {
        self.z.max_abs()
    }
}

/// Law-of-total-variance check against the Lyapunov flow at every stored
/// sample.
pub fn total_variance_checks(
    result: &TrajectoryResult,
    p: &PhysicalParams,
    state0: &GaussianState,
) -> Result<Vec<TotalVarianceCheck>> {
    let r0 = state0.mean;
    let sigma0 = state0.cov + Sym2::new(r0.x * r0.x, r0.x * r0.y, r0.y * r0.y) * 2.0;
    let last = *result.sample_steps.last().unwrap();
    let lyap = lyapunov_path(&sigma0, p, result.dt, last)?;
    let z = |diff: f64, se: f64| {
        if diff == 0.0 {
            0.0
        } else if se > 0.0 {
            diff / se
        } else {
            f64::INFINITY
        }
    };
    (0..result.n_samples())
        .map(|k| {
            let mom = ensemble_moments(result, k)?;
            let predicted = lyap[result.sample_steps[k]];
            let observed = result.cov_path[k] + mom.second * 2.0;
            let d = observed - predicted;
            let se = mom.second_se * 2.0;
            Ok(TotalVarianceCheck {
                t: result.time(k),
                predicted,
                observed,
                z: Sym2::new(z(d.xx, se.xx), z(d.xp, se.xp), z(d.pp, se.pp)),
            })
        })
        .collect()
}
