//! Second-moment dynamics of the monitored oscillator.
//!
//! The conditional covariance obeys the Riccati flow
//! `dσ/dt = Aσ + σAᵀ + Q − σBBᵀσ`, the unconditional one the Lyapunov flow
//! (same without the measurement term), and the derivative `σ' = ∂σ/∂Γ_fun`
//! the linear equation obtained by differentiating the Riccati flow.
//!
//! All integrators are fixed-step RK4 on symmetric matrices, so symmetry is
//! exact and runs are bit-reproducible.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use nalgebra::{Complex, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::gaussian::{CovMat, Sym2};
use crate::params::PhysicalParams;

/// Upper bound on `dt * omega_m` accepted by the integrators.
pub const MAX_STEP_PHASE: f64 = 0.1;
/// Default step as a fraction of the mechanical period.
pub const DEFAULT_STEPS_PER_PERIOD: f64 = 1000.0;
/// Slack on `det σ >= 1` tolerated inside integrators before declaring the
/// run unstable.
pub const INTEGRATION_DET_SLACK: f64 = 1e-6;
/// Relative Frobenius change per step regarded as stationary.
pub const STEADY_REL_CHANGE: f64 = 1e-13;
/// Number of consecutive stationary steps required by
/// [`integrate_riccati_to_steady`].
pub const STEADY_CONSECUTIVE_STEPS: usize = 100;

/// Default integration step `1e-3 · 2π/ω_m`.
pub fn default_dt(omega_m: f64) -> f64 {
    2.0 * PI / omega_m / DEFAULT_STEPS_PER_PERIOD
}

/// Drift, diffusion and measurement matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMatrices {
    pub a: Matrix2<f64>,
    pub q: Sym2,
    pub b: Matrix2<f64>,
}

impl ModelMatrices {
    /// `B Bᵀ`.
    pub fn bbt(&self) -> Sym2 {
        Sym2::from_matrix(&(self.b * self.b.transpose()))
    }

    /// `Aσ + σAᵀ` for symmetric σ.
    pub fn drift(&self, s: &Sym2) -> Sym2 {
        let m = self.a * s.to_matrix();
        Sym2::new(2.0 * m[(0, 0)], m[(0, 1)] + m[(1, 0)], 2.0 * m[(1, 1)])
    }

    /// `σ BBᵀ τ + τ BBᵀ σ`, symmetrized product used by the Riccati and
    /// sensitivity flows (with `σ = τ` it is twice `σBBᵀσ`).
    fn measurement_sym(&self, s: &Sym2, t: &Sym2) -> Sym2 {
        let bbt = self.bbt().to_matrix();
        let m = s.to_matrix() * bbt * t.to_matrix();
        Sym2::new(2.0 * m[(0, 0)], m[(0, 1)] + m[(1, 0)], 2.0 * m[(1, 1)])
    }
}

/// Builds `A = [[0, ω],[−ω, 0]]`, `Q = diag(0, 2(Γ_env + Γ_fun))` and `B`
/// with the single entry `B₁₂ = √(2ηΓ_env)`.
pub fn build_matrices(p: &PhysicalParams) -> Result<ModelMatrices> {
    p.validate()?;
    Ok(ModelMatrices {
        a: Matrix2::new(0.0, p.omega_m, -p.omega_m, 0.0),
        q: Sym2::diag(0.0, 2.0 * p.gamma_total()),
        b: Matrix2::new(0.0, (2.0 * p.eta * p.gamma_env).sqrt(), 0.0, 0.0),
    })
}

/// `Aσ + σAᵀ + Q − σBBᵀσ`.
pub fn riccati_rhs(cov: &CovMat, m: &ModelMatrices) -> Sym2 {
    m.drift(cov) + m.q - m.measurement_sym(cov, cov) * 0.5
}

/// `Aσ + σAᵀ + Q`.
pub fn lyapunov_rhs(cov: &CovMat, m: &ModelMatrices) -> Sym2 {
    m.drift(cov) + m.q
}

/// Right-hand side of the sensitivity equation
/// `σ'' = Aσ' + σ'Aᵀ + Q' − σ'BBᵀσ − σBBᵀσ'` with `Q' = diag(0, 2)`.
pub fn sensitivity_rhs(pair: &SensitivityPair, m: &ModelMatrices) -> SensitivityPair {
    SensitivityPair {
        cov: riccati_rhs(&pair.cov, m),
        dcov: m.drift(&pair.dcov) + Sym2::diag(0.0, 2.0) - m.measurement_sym(&pair.dcov, &pair.cov),
    }
}

/// Covariance together with its derivative with respect to `Γ_fun`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SensitivityPair {
    pub cov: CovMat,
    pub dcov: Sym2,
}

impl Add for SensitivityPair {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self {
            cov: self.cov + o.cov,
            dcov: self.dcov + o.dcov,
        }
    }
}

impl Mul<f64> for SensitivityPair {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self {
            cov: self.cov * s,
            dcov: self.dcov * s,
        }
    }
}

pub(crate) fn rk4_step<S, F>(y: S, h: f64, f: F) -> S
where
    S: Copy + Add<Output = S> + Mul<f64, Output = S>,
    F: Fn(&S) -> S,
{
    let k1 = f(&y);
    let k2 = f(&(y + k1 * (0.5 * h)));
    let k3 = f(&(y + k2 * (0.5 * h)));
    let k4 = f(&(y + k3 * h));
    y + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

/// Uniform step schedule reaching `t_final` exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepPlan {
    pub n_steps: usize,
    pub h: f64,
}

impl StepPlan {
    pub fn new(t_final: f64, dt: f64, omega_m: f64) -> Result<Self> {
        check_step(dt, omega_m)?;
        if !(t_final.is_finite() && t_final >= 0.0) {
            return Err(Error::param(
                "t_final",
                format!("must be finite and >= 0, got {t_final}"),
            ));
        }
        let ratio = t_final / dt;
        let nearest = ratio.round();
        let n = if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
            nearest
        } else {
            ratio.ceil()
        };
        if n > usize::MAX as f64 / 2.0 {
            return Err(Error::Overflow(format!("{n} integration steps")));
        }
        let n_steps = n as usize;
        let h = if n_steps == 0 { dt } else { t_final / n };
        Ok(Self { n_steps, h })
    }
}

pub(crate) fn check_step(dt: f64, omega_m: f64) -> Result<()> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", format!("must be finite and > 0, got {dt}")));
    }
    let product = dt * omega_m;
    if product > MAX_STEP_PHASE {
        return Err(Error::StepGuard {
            product,
            limit: MAX_STEP_PHASE,
        });
    }
    Ok(())
}

fn check_intermediate(cov: &CovMat, t: f64) -> Result<()> {
    if !cov.is_finite() {
        return Err(Error::IntegrationFailure {
            t,
            reason: "non-finite covariance".into(),
        });
    }
    if cov.xx <= 0.0 || cov.pp <= 0.0 || cov.det() < 1.0 - INTEGRATION_DET_SLACK {
        return Err(Error::IntegrationFailure {
            t,
            reason: format!("covariance left the physical set (det = {})", cov.det()),
        });
    }
    Ok(())
}

fn integrate_cov<F>(cov0: &CovMat, p: &PhysicalParams, t_final: f64, dt: f64, rhs: F) -> Result<CovMat>
where
    F: Fn(&CovMat, &ModelMatrices) -> Sym2,
{
    crate::gaussian::ensure_physical(cov0)?;
    let m = build_matrices(p)?;
    let plan = StepPlan::new(t_final, dt, p.omega_m)?;
    let mut cov = *cov0;
    for i in 0..plan.n_steps {
        cov = rk4_step(cov, plan.h, |s| rhs(s, &m));
        check_intermediate(&cov, (i + 1) as f64 * plan.h)?;
    }
    Ok(cov)
}

/// Conditional covariance at `t_final` under continuous monitoring.
pub fn integrate_riccati(cov0: &CovMat, p: &PhysicalParams, t_final: f64, dt: f64) -> Result<CovMat> {
    integrate_cov(cov0, p, t_final, dt, riccati_rhs)
}

/// Unconditional second moments at `t_final`; grows without bound.
pub fn integrate_lyapunov(cov0: &CovMat, p: &PhysicalParams, t_final: f64, dt: f64) -> Result<CovMat> {
    integrate_cov(cov0, p, t_final, dt, lyapunov_rhs)
}

/// Riccati solution sampled at every step `k·dt`, `k = 0..=n_steps`.
pub fn riccati_path(cov0: &CovMat, p: &PhysicalParams, dt: f64, n_steps: usize) -> Result<Vec<CovMat>> {
    crate::gaussian::ensure_physical(cov0)?;
    check_step(dt, p.omega_m)?;
    let m = build_matrices(p)?;
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut cov = *cov0;
    out.push(cov);
    for i in 0..n_steps {
        cov = rk4_step(cov, dt, |s| riccati_rhs(s, &m));
        check_intermediate(&cov, (i + 1) as f64 * dt)?;
        out.push(cov);
    }
    Ok(out)
}

/// Lyapunov solution sampled at every step `k·dt`, `k = 0..=n_steps`.
pub fn lyapunov_path(cov0: &CovMat, p: &PhysicalParams, dt: f64, n_steps: usize) -> Result<Vec<CovMat>> {
    crate::gaussian::ensure_physical(cov0)?;
    check_step(dt, p.omega_m)?;
    let m = build_matrices(p)?;
    let mut out = Vec::with_capacity(n_steps + 1);
    let mut cov = *cov0;
    out.push(cov);
    for _ in 0..n_steps {
        cov = rk4_step(cov, dt, |s| lyapunov_rhs(s, &m));
        out.push(cov);
    }
    Ok(out)
}

/// Integrates the Riccati flow until the relative Frobenius change per step
/// stays below [`STEADY_REL_CHANGE`] for [`STEADY_CONSECUTIVE_STEPS`] steps.
/// Returns the stationary covariance and the time at which it was reached.
pub fn integrate_riccati_to_steady(cov0: &CovMat, p: &PhysicalParams, dt: f64, max_time: f64) -> Result<(CovMat, f64)> {
    crate::gaussian::ensure_physical(cov0)?;
    let m = build_matrices(p)?;
    let plan = StepPlan::new(max_time, dt, p.omega_m)?;
    let mut cov = *cov0;
    let mut quiet = 0usize;
    for i in 0..plan.n_steps {
        let next = rk4_step(cov, plan.h, |s| riccati_rhs(s, &m));
        let t = (i + 1) as f64 * plan.h;
        check_intermediate(&next, t)?;
        let change = (next - cov).frobenius() / next.frobenius();
        cov = next;
        if change < STEADY_REL_CHANGE {
            quiet += 1;
            if quiet >= STEADY_CONSECUTIVE_STEPS {
                return Ok((cov, t));
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::IntegrationFailure {
        t: max_time,
        reason: "no stationary point reached".into(),
    })
}

/// Jointly integrates `(σ, ∂σ/∂Γ_fun)` to `t_final`.
///
/// Use `dcov0 = 0` when the initial state does not depend on `Γ_fun` (e.g. a
/// thermal state); a parameter-dependent preparation supplies its own
/// derivative here.
pub fn integrate_sensitivity(
    cov0: &CovMat,
    dcov0: &Sym2,
    p: &PhysicalParams,
    t_final: f64,
    dt: f64,
) -> Result<SensitivityPair> {
    let plan = StepPlan::new(t_final, dt, p.omega_m)?;
    let path = sensitivity_path(cov0, dcov0, p, plan.h, plan.n_steps, plan.n_steps.max(1))?;
    Ok(path.last().expect("path holds the initial sample").1)
}

/// Sensitivity pair sampled every `stride` steps of size `dt`, starting at
/// `t = 0`. The final step is always included.
pub fn sensitivity_path(
    cov0: &CovMat,
    dcov0: &Sym2,
    p: &PhysicalParams,
    dt: f64,
    n_steps: usize,
    stride: usize,
) -> Result<Vec<(f64, SensitivityPair)>> {
    crate::gaussian::ensure_physical(cov0)?;
    check_step(dt, p.omega_m)?;
    if stride == 0 {
        return Err(Error::param("stride", "must be >= 1"));
    }
    let m = build_matrices(p)?;
    let mut y = SensitivityPair {
        cov: *cov0,
        dcov: *dcov0,
    };
    let mut out = vec![(0.0, y)];
    for i in 0..n_steps {
        y = rk4_step(y, dt, |s| sensitivity_rhs(s, &m));
        let t = (i + 1) as f64 * dt;
        check_intermediate(&y.cov, t)?;
        if (i + 1) % stride == 0 || i + 1 == n_steps {
            out.push((t, y));
        }
    }
    Ok(out)
}

/// `Υ − ω_m = 4ηΓ_env(Γ_env + Γ_fun)/(Υ + ω_m)`, free of cancellation.
pub(crate) fn upsilon_minus_omega(p: &PhysicalParams, upsilon: f64) -> f64 {
    4.0 * p.eta * p.gamma_env * p.gamma_total() / (upsilon + p.omega_m)
}

/// `Υ = √(ω_m² + 4ηΓ_env(Γ_env + Γ_fun))`.
pub fn upsilon(p: &PhysicalParams) -> f64 {
    (p.omega_m * p.omega_m + 4.0 * p.eta * p.gamma_env * p.gamma_total()).sqrt()
}

/// Closed-form stabilizing solution of the Riccati equation.
pub fn steady_state_analytic(p: &PhysicalParams) -> Result<CovMat> {
    p.validate()?;
    if p.eta == 0.0 {
        return Err(Error::NoSteadyState);
    }
    let w = p.omega_m;
    let ups = upsilon(p);
    let d = upsilon_minus_omega(p, ups);
    let eg = p.eta * p.gamma_env;
    Ok(Sym2::new(
        (w * d).sqrt() / (2f64.sqrt() * eg),
        d / (2.0 * eg),
        ups * d.sqrt() / ((2.0 * w).sqrt() * eg),
    ))
}

/// Detectability of `(B, A)`: every eigenvector of `A` with non-negative real
/// eigenvalue part must be seen by `B`.
pub fn detectability(p: &PhysicalParams) -> Result<bool> {
    let m = build_matrices(p)?;
    Ok(is_detectable(&m))
}

pub fn is_detectable(m: &ModelMatrices) -> bool {
    let a = &m.a;
    let tr = a.trace();
    let det = a.determinant();
    let disc = Complex::new(tr * tr / 4.0 - det, 0.0).sqrt();
    let lambdas = [Complex::new(tr / 2.0, 0.0) + disc, Complex::new(tr / 2.0, 0.0) - disc];
    let bc = m.b.map(|v| Complex::new(v, 0.0));
    lambdas
        .iter()
        .filter(|l| l.re >= 0.0)
        .all(|&l| eigenvectors(a, l).iter().all(|x| (bc * x).norm() > 0.0))
}

fn eigenvectors(a: &Matrix2<f64>, l: Complex<f64>) -> Vec<Vector2<Complex<f64>>> {
    let c = |v: f64| Complex::new(v, 0.0);
    if a[(0, 1)] != 0.0 {
        vec![Vector2::new(c(a[(0, 1)]), l - a[(0, 0)])]
    } else if a[(1, 0)] != 0.0 {
        vec![Vector2::new(l - a[(1, 1)], c(a[(1, 0)]))]
    } else {
        // Diagonal A: the eigenspace may be the whole plane.
        let mut v = Vec::new();
        if (c(a[(0, 0)]) - l).norm() == 0.0 {
            v.push(Vector2::new(c(1.0), c(0.0)));
        }
        if (c(a[(1, 1)]) - l).norm() == 0.0 {
            v.push(Vector2::new(c(0.0), c(1.0)));
        }
        v
    }
}

/// Checks `Aσ + σAᵀ + Q ≥ 0` (eigenvalues ≥ −1e-12).
pub fn verify_stabilizing(cov: &CovMat, p: &PhysicalParams) -> Result<bool> {
    let m = build_matrices(p)?;
    Ok(is_stabilizing(cov, &m))
}

pub fn is_stabilizing(cov: &CovMat, m: &ModelMatrices) -> bool {
    let (_, lo) = lyapunov_rhs(cov, m).eigenvalues();
    lo >= -1e-12
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{factor_pure, is_physical};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn fig1() -> PhysicalParams {
        PhysicalParams::new(1.0, 0.1, 0.01, 1.0).unwrap()
    }

    #[test]
    fn matrices_hand_evaluated() {
        let m = build_matrices(&fig1()).unwrap();
        assert_eq!(m.a, Matrix2::new(0.0, 1.0, -1.0, 0.0));
        assert_relative_eq!(m.q.pp, 0.22, max_relative = 1e-15);
        assert_eq!((m.q.xx, m.q.xp), (0.0, 0.0));
        assert_relative_eq!(m.b[(0, 1)], 0.2f64.sqrt(), max_relative = 1e-15);
        assert_eq!((m.b[(0, 0)], m.b[(1, 0)], m.b[(1, 1)]), (0.0, 0.0, 0.0));

        let m0 = build_matrices(&fig1().with_eta(0.0)).unwrap();
        assert_eq!(m0.b, Matrix2::zeros());
        let mf = build_matrices(&fig1().with_gamma_fun(0.0)).unwrap();
        assert_relative_eq!(mf.q.pp, 0.2, max_relative = 1e-15);
    }

    #[test]
    fn riccati_rhs_at_identity() {
        let m = build_matrices(&fig1()).unwrap();
        let r = riccati_rhs(&Sym2::identity(), &m);
        assert_relative_eq!(r.xx, -0.2, max_relative = 1e-14);
        assert_eq!(r.xp, 0.0);
        assert_relative_eq!(r.pp, 0.22, max_relative = 1e-14);

        let m0 = build_matrices(&fig1().with_eta(0.0)).unwrap();
        assert_eq!(riccati_rhs(&Sym2::identity(), &m0), m0.q);
    }

    #[test]
    fn steady_state_reference_values() {
        let s = steady_state_analytic(&fig1()).unwrap();
        assert_relative_eq!(s.xx, 1.043_148_65, max_relative = 1e-8);
        assert_relative_eq!(s.xp, 0.108_815_91, max_relative = 1e-7);
        assert_relative_eq!(s.pp, 1.065_850_88, max_relative = 1e-8);
        assert_relative_eq!(s.det(), 1.1, max_relative = 1e-12);
        let r = riccati_rhs(&s, &build_matrices(&fig1()).unwrap());
        assert!(r.max_abs() <= 1e-12);
    }

    #[test]
    fn pure_steady_state_without_collapse() {
        let s = steady_state_analytic(&fig1().with_gamma_fun(0.0)).unwrap();
        assert!((s.det() - 1.0).abs() <= 1e-12);
        let f = factor_pure(&s).unwrap();
        assert!((f.reconstruct() - s).frobenius() / s.frobenius() < 1e-10);
        assert!(f.r > 0.0);
    }

    #[test]
    fn no_steady_state_without_monitoring() {
        assert_eq!(steady_state_analytic(&fig1().with_eta(0.0)), Err(Error::NoSteadyState));
    }

    #[test]
    fn detectability_examples() {
        assert!(detectability(&fig1().with_eta(0.5)).unwrap());
        assert!(!detectability(&fig1().with_eta(0.0)).unwrap());
        assert!(detectability(&fig1().with_eta(1e-12)).unwrap());
    }

    #[test]
    fn stabilizing_examples() {
        for eta in [0.05, 0.3, 0.7, 1.0] {
            let p = fig1().with_eta(eta);
            assert!(verify_stabilizing(&steady_state_analytic(&p).unwrap(), &p).unwrap());
        }
        let m = build_matrices(&fig1()).unwrap();
        let l = lyapunov_rhs(&Sym2::identity(), &m);
        assert_eq!((l.xx, l.xp), (0.0, 0.0));
        assert_relative_eq!(l.pp, 0.22, max_relative = 1e-15);
        assert!(is_stabilizing(&Sym2::identity(), &m));
        let neg = ModelMatrices { q: -m.q, ..m };
        assert!(!is_stabilizing(&Sym2::identity(), &neg));
    }

    #[test]
    fn zero_time_returns_initial() {
        let p = fig1();
        let c0 = Sym2::new(2.0, 0.3, 1.5);
        assert_eq!(integrate_riccati(&c0, &p, 0.0, 0.01).unwrap(), c0);
        assert_eq!(integrate_lyapunov(&c0, &p, 0.0, 0.01).unwrap(), c0);
        let pair = integrate_sensitivity(&c0, &Sym2::ZERO, &p, 0.0, 0.01).unwrap();
        assert_eq!(pair.dcov, Sym2::ZERO);
    }

    #[test]
    fn step_guard_and_bad_inputs() {
        let p = fig1();
        assert!(matches!(
            integrate_riccati(&Sym2::identity(), &p, 1.0, 0.2),
            Err(Error::StepGuard { .. })
        ));
        assert!(integrate_riccati(&Sym2::identity(), &p, 1.0, 0.0).is_err());
        assert!(integrate_riccati(&Sym2::identity(), &p, -1.0, 0.01).is_err());
        assert!(matches!(
            integrate_riccati(&Sym2::scalar(0.5), &p, 1.0, 0.01),
            Err(Error::InvalidState { .. })
        ));
    }

    #[test]
    fn step_plan_hits_final_time() {
        let plan = StepPlan::new(1.0, 0.1, 1.0).unwrap();
        assert_eq!(plan.n_steps, 10);
        let plan = StepPlan::new(1.05, 0.1, 1.0).unwrap();
        assert_eq!(plan.n_steps, 11);
        assert_relative_eq!(plan.h * 11.0, 1.05, max_relative = 1e-15);
    }

    #[test]
    fn lyapunov_heats_and_matches_unmonitored_riccati() {
        let p = fig1();
        let c0 = Sym2::identity();
        let a = integrate_lyapunov(&c0, &p, 10.0, 0.01).unwrap();
        let b = integrate_lyapunov(&c0, &p, 20.0, 0.01).unwrap();
        assert!(b.trace() > a.trace());
        let r = integrate_riccati(&c0, &p.with_eta(0.0), 20.0, 0.01).unwrap();
        assert!((r - b).max_abs() <= 1e-12 * b.max_abs());
    }

    #[test]
    fn detects_steady_state() {
        let p = fig1();
        let (s, t) = integrate_riccati_to_steady(&Sym2::thermal(3.0), &p, 0.01, 2000.0).unwrap();
        let exact = steady_state_analytic(&p).unwrap();
        assert!((s - exact).frobenius() / exact.frobenius() < 1e-10);
        assert!(t > 0.0 && t < 2000.0);
    }

    fn fixed_point_grid() -> Vec<PhysicalParams> {
        let mut v = Vec::new();
        for &ge in &[0.01, 0.1, 0.5] {
            for i in 1..=10 {
                for j in 0..10 {
                    let eta = i as f64 / 10.0;
                    let gf = ge * j as f64 / 9.0;
                    v.push(PhysicalParams::new(1.0, ge, gf, eta).unwrap());
                }
            }
        }
        v
    }

    #[test]
    fn analytic_steady_state_is_fixed_point_on_grid() {
        for p in fixed_point_grid() {
            let s = steady_state_analytic(&p).unwrap();
            let r = riccati_rhs(&s, &build_matrices(&p).unwrap());
            assert!(r.max_abs() <= 1e-10 * p.omega_m * s.max_abs(), "{p:?} residual {r:?}");
            assert!(is_physical(&s));
        }
    }

    #[test]
    fn pure_endpoint_only_at_perfect_monitoring_without_collapse() {
        for p in fixed_point_grid() {
            let det = steady_state_analytic(&p).unwrap().det();
            if p.eta == 1.0 && p.gamma_fun == 0.0 {
                assert!((det - 1.0).abs() <= 1e-10);
            } else {
                assert!(det > 1.0 + 1e-10, "{p:?} det {det}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn riccati_preserves_physicality(
            eta in 0.01f64..=1.0,
            ge in 0.01f64..0.5,
            ratio in 0.0f64..1.0,
            r in 0.0f64..1.5,
            theta in 0.0f64..PI,
            nu in 1.0f64..20.0,
        ) {
            let p = PhysicalParams::new(1.0, ge, ratio * ge, eta).unwrap();
            let c0 = crate::gaussian::SqueezeFactorization { r, theta }.reconstruct() * nu;
            let path = riccati_path(&c0, &p, 0.01, 500).unwrap();
            for c in path.iter().step_by(25) {
                prop_assert!(c.det() >= 1.0 - 1e-9);
            }
        }

        #[test]
        fn riccati_converges_to_closed_form(
            eta in 0.1f64..=1.0,
            ge in prop::sample::select(vec![0.1, 0.5]),
            ratio in 0.0f64..1.0,
            nu in 1.0f64..10.0,
        ) {
            let p = PhysicalParams::new(1.0, ge, ratio * ge, eta).unwrap();
            let horizon = 50.0 / (eta * ge).min(1.0);
            let s = integrate_riccati(&Sym2::scalar(nu), &p, horizon, 0.05).unwrap();
            let exact = steady_state_analytic(&p).unwrap();
            prop_assert!((s - exact).frobenius() / exact.frobenius() <= 1e-6);
        }
    }
}
