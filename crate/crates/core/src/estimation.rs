//! Fisher information, signal-to-noise bounds and measurement budgets for
//! the fundamental diffusion rate `Γ_fun`.
//!
//! Every quantity here assumes zero first moments: the feedback loop keeps the
//! conditional mean at the origin, so only the covariance carries information
//! and the first-moment term of the Gaussian QFI is absent.

use serde::{Deserialize, Serialize};

use crate::dynamics::{sensitivity_path, upsilon, upsilon_minus_omega, StepPlan};
use crate::error::{Error, Result};
use crate::gaussian::{ensure_physical, overlap_unchecked, CovMat, Sym2, PURE_DET_TOL};
use crate::params::PhysicalParams;

/// Threshold on `|1 − μ⁴|` and `|μ'|` used to detect the pure-state pole.
pub const DIVERGENCE_TOL: f64 = 1e-12;
/// Outcome probabilities this close to 0 or 1 make the dichotomic FI undefined.
pub const POVM_DEGENERACY_TOL: f64 = 1e-14;

/// A Fisher-information value, or the flag that it diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub value: f64,
    pub divergent: bool,
}

impl QfiResult {
    pub fn finite(value: f64) -> Self {
        Self {
            value,
            divergent: false,
        }
    }

    pub fn divergent() -> Self {
        Self {
            value: f64::INFINITY,
            divergent: true,
        }
    }

    /// The value when finite.
    pub fn finite_value(&self) -> Option<f64> {
        (!self.divergent).then_some(self.value)
    }
}

/// Dichotomic measurement `{|ψ⟩⟨ψ|, 1 − |ψ⟩⟨ψ|}` projecting on the pure
/// steady state reached at `reference`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PovmSpec {
    reference: PhysicalParams,
    projector: CovMat,
}

impl PovmSpec {
    pub fn new(reference: PhysicalParams) -> Result<Self> {
        let projector = crate::dynamics::steady_state_analytic(&reference)?;
        let det = projector.det();
        if (det - 1.0).abs() > PURE_DET_TOL {
            return Err(Error::NotPure { det });
        }
        Ok(Self { reference, projector })
    }

    /// Projector on the steady state for perfect monitoring and no collapse,
    /// with the frequency and environmental rate of `p`.
    pub fn optimal_at_zero_collapse(p: &PhysicalParams) -> Result<Self> {
        Self::new(PhysicalParams {
            eta: 1.0,
            gamma_fun: 0.0,
            ..*p
        })
    }

    pub fn reference(&self) -> &PhysicalParams {
        &self.reference
    }

    /// Covariance of the pure state `|ψ⟩`.
    pub fn projector(&self) -> &CovMat {
        &self.projector
    }
}

/// Gaussian QFI for a zero-mean family:
/// `H = ½ Tr[(σ⁻¹σ')²]/(1 + μ²) + 2μ'²/(1 − μ⁴)` with `μ = 1/√det σ` and
/// `μ' = −½ μ Tr[σ⁻¹σ']`.
pub fn qfi_gaussian(cov: &CovMat, dcov: &Sym2) -> Result<QfiResult> {
    ensure_physical(cov)?;
    let inv = cov.inverse().expect("physical covariance is invertible");
    let x = inv.to_matrix() * dcov.to_matrix();
    let tr_x = x.trace();
    let tr_x2 = (x * x).trace();
    let mu = 1.0 / cov.det().sqrt();
    let dmu = -0.5 * mu * tr_x;
    let mu2 = mu * mu;
    let gap = 1.0 - mu2 * mu2;
    let first = 0.5 * tr_x2 / (1.0 + mu2);
    if gap.abs() < DIVERGENCE_TOL {
        if dmu.abs() > DIVERGENCE_TOL {
            return Ok(QfiResult::divergent());
        }
        return Ok(QfiResult::finite(first));
    }
    Ok(QfiResult::finite(first + 2.0 * dmu * dmu / gap))
}

/// `∂σ_ss/∂Γ_fun` in closed form, using `dΥ/dΓ_fun = 2ηΓ_env/Υ`.
pub fn dcov_steady(p: &PhysicalParams) -> Result<Sym2> {
    p.validate()?;
    if p.eta == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let w = p.omega_m;
    let ups = upsilon(p);
    let d = upsilon_minus_omega(p, ups);
    let dd = 2.0 * p.eta * p.gamma_env / ups;
    let eg = p.eta * p.gamma_env;
    let sd = d.sqrt();
    Ok(Sym2::new(
        w.sqrt() * dd / (2.0 * sd * 2f64.sqrt() * eg),
        dd / (2.0 * eg),
        dd * (sd + ups / (2.0 * sd)) / ((2.0 * w).sqrt() * eg),
    ))
}

/// Steady-state QFI in closed form,
/// `H_ss = [Γ_env((1−η)ω − (3+η)Υ) + Γ_fun(ω − 3Υ)] /
///         [8Υ(Γ_env+Γ_fun)(η²Γ_env² − (Γ_env+Γ_fun)²)]`.
pub fn qfi_steady_closed(p: &PhysicalParams) -> Result<QfiResult> {
    p.validate()?;
    if p.eta == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let (w, ge, gf, eta) = (p.omega_m, p.gamma_env, p.gamma_fun, p.eta);
    let g = p.gamma_total();
    // η²Γ_env² − Γ² = −((1−η)Γ_env + Γ_fun)(ηΓ_env + Γ); the factored
    // form is free of cancellation, so only an exact zero is a pole.
    let gap = (1.0 - eta) * ge + gf;
    if gap <= 0.0 {
        return Ok(QfiResult::divergent());
    }
    let ups = upsilon(p);
    let num = ge * ((1.0 - eta) * w - (3.0 + eta) * ups) + gf * (w - 3.0 * ups);
    let den = -8.0 * ups * g * gap * (eta * ge + g);
    let h = num / den;
    if !h.is_finite() {
        return Ok(QfiResult::divergent());
    }
    Ok(QfiResult::finite(h))
}

/// QFI at perfect monitoring,
/// `(3 + 4Γ_env/Γ_fun − ω/Υ) / (8(Γ_env+Γ_fun)(2Γ_env+Γ_fun))`.
pub fn qfi_eta1(gamma_env: f64, gamma_fun: f64, omega_m: f64) -> Result<QfiResult> {
    let p = PhysicalParams::new(omega_m, gamma_env, gamma_fun, 1.0)?;
    if gamma_fun == 0.0 {
        return Ok(QfiResult::divergent());
    }
    let ups = upsilon(&p);
    let num = 3.0 + 4.0 * gamma_env / gamma_fun - omega_m / ups;
    Ok(QfiResult::finite(
        num / (8.0 * (gamma_env + gamma_fun) * (2.0 * gamma_env + gamma_fun)),
    ))
}

/// Probability of the projective outcome of `spec` on the steady state of `p`.
pub fn povm_probability(p: &PhysicalParams, spec: &PovmSpec) -> Result<f64> {
    let s = crate::dynamics::steady_state_analytic(p)?;
    Ok(overlap_unchecked(&s, spec.projector()))
}

/// Classical Fisher information of the dichotomic POVM,
/// `F = (∂p₀/∂Γ_fun)² / (p₀(1 − p₀))`.
///
/// `p₀ = 1/√det((σ_ss + σ_ref)/2)`, and its derivative follows from Jacobi's
/// formula: `∂p₀ = −½ p₀ Tr[(σ_ss + σ_ref)⁻¹ ∂σ_ss]`.
pub fn povm_fi(p: &PhysicalParams, spec: &PovmSpec) -> Result<f64> {
    let s = crate::dynamics::steady_state_analytic(p)?;
    let ds = dcov_steady(p)?;
    let sum = s + *spec.projector();
    let p0 = overlap_unchecked(&s, spec.projector());
    if p0 <= POVM_DEGENERACY_TOL || p0 >= 1.0 - POVM_DEGENERACY_TOL {
        return Err(Error::DegeneratePovm { p0 });
    }
    let inv = sum.inverse().expect("sum of physical covariances is invertible");
    let dp0 = -0.5 * p0 * (inv.to_matrix() * ds.to_matrix()).trace();
    Ok(dp0 * dp0 / (p0 * (1.0 - p0)))
}

/// QCRB-saturating signal-to-noise ratio `Γ_fun √(M H_ss)` after `m_runs`
/// repetitions.
pub fn snr_bound(p: &PhysicalParams, m_runs: u64) -> Result<f64> {
    if m_runs == 0 {
        return Err(Error::param("m_runs", "must be >= 1"));
    }
    let h = qfi_steady_closed(p)?;
    if p.gamma_fun == 0.0 {
        // Γ_fun √H → 0 even where H diverges.
        return Ok(0.0);
    }
    match h.finite_value() {
        Some(v) => Ok(p.gamma_fun * (m_runs as f64 * v).sqrt()),
        None => Ok(f64::INFINITY),
    }
}

/// SNR bound at perfect monitoring written in terms of
/// `β = αħλ_csl/(m r_c²)`; decreasing in `omega_m`.
pub fn snr_csl_eta1(beta: f64, gamma_env: f64, omega_m: f64, m_runs: u64) -> Result<f64> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::param("beta", format!("must be finite and > 0, got {beta}")));
    }
    if m_runs == 0 {
        return Err(Error::param("m_runs", "must be >= 1"));
    }
    PhysicalParams::new(omega_m, gamma_env, beta / omega_m, 1.0)?;
    let w = omega_m;
    let ups = (w * w + 4.0 * gamma_env * (gamma_env + beta / w)).sqrt();
    let num = 3.0 + 4.0 * w * gamma_env / beta - w / ups;
    let den = 8.0 * (beta + gamma_env * w) * (beta + 2.0 * gamma_env * w);
    Ok((m_runs as f64).sqrt() * beta * (num / den).sqrt())
}

/// Minimum number of runs for unit SNR, `⌈1/(Γ_fun² H_ss)⌉`.
pub fn runs_for_unit_snr(p: &PhysicalParams) -> Result<u64> {
    p.validate()?;
    if p.gamma_fun <= 0.0 {
        return Err(Error::param("gamma_fun", "must be > 0 for a finite run count"));
    }
    let h = qfi_steady_closed(p)?;
    match h.finite_value() {
        None => Ok(1),
        Some(v) => {
            let m = (1.0 / (p.gamma_fun * p.gamma_fun * v)).ceil();
            if m >= u64::MAX as f64 {
                Err(Error::Overflow(format!("{m} runs")))
            } else {
                Ok((m as u64).max(1))
            }
        }
    }
}

/// QFI of the conditional state at time `t`, starting from a thermal state
/// with occupation `n_th` (which carries no information: `σ'(0) = 0`).
pub fn qfi_finite_time(p: &PhysicalParams, n_th: f64, t: f64, dt: f64) -> Result<QfiResult> {
    let plan = StepPlan::new(t, dt, p.omega_m)?;
    let series = qfi_time_series(p, n_th, plan.h, plan.n_steps, plan.n_steps.max(1))?;
    Ok(series.last().expect("series holds t = 0").1)
}

/// Finite-time QFI sampled every `stride` steps of size `dt` from `t = 0`.
pub fn qfi_time_series(
    p: &PhysicalParams,
    n_th: f64,
    dt: f64,
    n_steps: usize,
    stride: usize,
) -> Result<Vec<(f64, QfiResult)>> {
    if !(n_th.is_finite() && n_th >= 0.0) {
        return Err(Error::param("n_th", format!("must be finite and >= 0, got {n_th}")));
    }
    let path = sensitivity_path(&Sym2::thermal(n_th), &Sym2::ZERO, p, dt, n_steps, stride)?;
    path.into_iter()
        .map(|(t, pair)| Ok((t, qfi_gaussian(&pair.cov, &pair.dcov)?)))
        .collect()
}
