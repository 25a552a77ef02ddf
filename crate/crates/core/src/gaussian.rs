//! Single-mode zero-mean Gaussian states described by their covariance matrix.
//!
//! Convention: `sigma_jk = Tr[{r_j - <r_j>, r_k - <r_k>} rho]` with the
//! anticommutator taken without the usual factor 1/2, so the vacuum has
//! `sigma = I` and the uncertainty relation reads `det sigma >= 1`. To convert
//! from the "symmetrized second moment" convention (vacuum = I/2), multiply by 2.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `det sigma - 1` below which a state is accepted as physical.
pub const PHYSICAL_DET_TOL: f64 = 1e-12;
/// Tolerance on `|det sigma - 1|` for classifying a state as pure.
pub const PURE_DET_TOL: f64 = 1e-9;

/// Real symmetric 2×2 matrix. Stores a single off-diagonal entry, so symmetry
/// holds by construction. Used both for covariance matrices and for their
/// parameter derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2 {
    pub xx: f64,
    pub xp: f64,
    pub pp: f64,
}

/// Covariance matrix of the quadratures `(x, p)`.
pub type CovMat = Sym2;

impl Sym2 {
    pub const ZERO: Sym2 = Sym2 {
        xx: 0.0,
        xp: 0.0,
        pp: 0.0,
    };

    pub const fn new(xx: f64, xp: f64, pp: f64) -> Self {
        Self { xx, xp, pp }
    }

    pub const fn identity() -> Self {
        Self::scalar(1.0)
    }

    pub const fn scalar(v: f64) -> Self {
        Self::new(v, 0.0, v)
    }

    pub const fn diag(xx: f64, pp: f64) -> Self {
        Self::new(xx, 0.0, pp)
    }

    /// Covariance of a thermal state with mean occupation `n_th`.
    pub fn thermal(n_th: f64) -> Self {
        Self::scalar(2.0 * n_th + 1.0)
    }

    /// Symmetric part of an arbitrary 2×2 matrix.
    pub fn from_matrix(m: &Matrix2<f64>) -> Self {
        Self::new(m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]), m[(1, 1)])
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.xx, self.xp, self.xp, self.pp)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.pp
    }

    /// Frobenius norm (off-diagonal entry counted twice).
    pub fn frobenius(&self) -> f64 {
        (self.xx * self.xx + 2.0 * self.xp * self.xp + self.pp * self.pp).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.xx.abs().max(self.xp.abs()).max(self.pp.abs())
    }

    pub fn inverse(&self) -> Option<Sym2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some(Sym2::new(self.pp / d, -self.xp / d, self.xx / d))
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.xx + self.pp);
        let half_diff = 0.5 * (self.xx - self.pp);
        let rad = half_diff.hypot(self.xp);
        (mean + rad, mean - rad)
    }

    pub fn is_finite(&self) -> bool {
        self.xx.is_finite() && self.xp.is_finite() && self.pp.is_finite()
    }

    pub fn mul_vec(&self, v: &Vector2<f64>) -> Vector2<f64> {
        Vector2::new(self.xx * v.x + self.xp * v.y, self.xp * v.x + self.pp * v.y)
    }
}

impl Add for Sym2 {
    type Output = Sym2;
    fn add(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx + o.xx, self.xp + o.xp, self.pp + o.pp)
    }
}

impl Sub for Sym2 {
    type Output = Sym2;
    fn sub(self, o: Sym2) -> Sym2 {
        Sym2::new(self.xx - o.xx, self.xp - o.xp, self.pp - o.pp)
    }
}

impl Neg for Sym2 {
    type Output = Sym2;
    fn neg(self) -> Sym2 {
        Sym2::new(-self.xx, -self.xp, -self.pp)
    }
}

impl Mul<f64> for Sym2 {
    type Output = Sym2;
    fn mul(self, s: f64) -> Sym2 {
        Sym2::new(self.xx * s, self.xp * s, self.pp * s)
    }
}

/// Zero-or-nonzero-mean Gaussian state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: Vector2<f64>,
    pub cov: CovMat,
}

impl GaussianState {
    pub fn new(mean: Vector2<f64>, cov: CovMat) -> Result<Self> {
        ensure_physical(&cov)?;
        Ok(Self { mean, cov })
    }

    pub fn zero_mean(cov: CovMat) -> Result<Self> {
        Self::new(Vector2::zeros(), cov)
    }

    pub fn thermal(n_th: f64) -> Result<Self> {
        Self::zero_mean(Sym2::thermal(n_th))
    }
}

/// Parameters of `sigma = R(theta) diag(e^{2r}, e^{-2r}) R(theta)^T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeFactorization {
    pub r: f64,
    pub theta: f64,
}

impl SqueezeFactorization {
    pub fn reconstruct(&self) -> CovMat {
        let (s, c) = self.theta.sin_cos();
        let big = (2.0 * self.r).exp();
        let small = (-2.0 * self.r).exp();
        Sym2::new(
            big * c * c + small * s * s,
            (big - small) * s * c,
            big * s * s + small * c * c,
        )
    }
}

/// Positive definite with `det sigma >= 1 - 1e-12`.
pub fn is_physical(cov: &CovMat) -> bool {
    cov.is_finite() && cov.xx > 0.0 && cov.det() > 0.0 && cov.det() >= 1.0 - PHYSICAL_DET_TOL
}

pub(crate) fn ensure_physical(cov: &CovMat) -> Result<()> {
    if is_physical(cov) {
        Ok(())
    } else {
        Err(Error::InvalidState {
            det: cov.det(),
            xx: cov.xx,
            xp: cov.xp,
            pp: cov.pp,
        })
    }
}

/// Purity `Tr[rho^2] = 1/sqrt(det sigma)`.
pub fn purity(cov: &CovMat) -> Result<f64> {
    ensure_physical(cov)?;
    Ok(1.0 / cov.det().sqrt())
}

/// `Tr[rho_a rho_b] = 1/sqrt(det((sigma_a + sigma_b)/2))` for zero-mean states.
pub fn overlap(a: &CovMat, b: &CovMat) -> Result<f64> {
    ensure_physical(a)?;
    ensure_physical(b)?;
    Ok(overlap_unchecked(a, b))
}

pub(crate) fn overlap_unchecked(a: &CovMat, b: &CovMat) -> f64 {
    let m = (*a + *b) * 0.5;
    1.0 / m.det().sqrt()
}

/// Symplectic factorization of a pure covariance matrix into a squeezer and a
/// rotation.
pub fn factor_pure(cov: &CovMat) -> Result<SqueezeFactorization> {
    ensure_physical(cov)?;
    let det = cov.det();
    if (det - 1.0).abs() > PURE_DET_TOL {
        return Err(Error::NotPure { det });
    }
    let (hi, lo) = cov.eigenvalues();
    let r = 0.25 * (hi / lo).ln();
    if r <= 1e-12 {
        return Ok(SqueezeFactorization { r: 0.0, theta: 0.0 });
    }
    // Angle of the eigenvector belonging to the larger eigenvalue.
    let mut theta = 0.5 * (2.0 * cov.xp).atan2(cov.xx - cov.pp);
    if theta < 0.0 {
        theta += PI;
    }
    if theta >= PI {
        theta -= PI;
    }
    Ok(SqueezeFactorization { r, theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn purity_examples() {
        assert_eq!(purity(&Sym2::identity()).unwrap(), 1.0);
        assert_relative_eq!(
            purity(&Sym2::thermal(100.0)).unwrap(),
            1.0 / 201.0,
            max_relative = 1e-15
        );
        // det = 1.1 * 1.0 - 0 = 1.1
        let c = Sym2::diag(1.1, 1.0);
        assert_relative_eq!(purity(&c).unwrap(), 0.953_462_589_245_592_4, max_relative = 1e-14);
        assert!(matches!(purity(&Sym2::scalar(0.5)), Err(Error::InvalidState { .. })));
    }

    #[test]
    fn overlap_examples() {
        assert_eq!(overlap(&Sym2::identity(), &Sym2::identity()).unwrap(), 1.0);
        assert_relative_eq!(
            overlap(&Sym2::identity(), &Sym2::scalar(2.0)).unwrap(),
            2.0 / 3.0,
            max_relative = 1e-15
        );
        assert!(overlap(&Sym2::identity(), &Sym2::diag(0.5, 0.5)).is_err());
    }

    #[test]
    fn physicality_examples() {
        assert!(is_physical(&Sym2::identity()));
        assert!(!is_physical(&Sym2::diag(0.5, 0.5)));
        assert!(is_physical(&Sym2::diag(4.0, 0.25)));
        assert!(!is_physical(&Sym2::diag(-2.0, -2.0)));
        assert!(!is_physical(&Sym2::new(f64::NAN, 0.0, 1.0)));
    }

    #[test]
    fn factor_diagonal_and_vacuum() {
        let f = factor_pure(&Sym2::identity()).unwrap();
        assert_eq!((f.r, f.theta), (0.0, 0.0));
        let e2 = 2f64.exp();
        let f = factor_pure(&Sym2::diag(e2, 1.0 / e2)).unwrap();
        assert_relative_eq!(f.r, 1.0, max_relative = 1e-14);
        assert!(f.theta.abs() < 1e-15);
        // momentum-squeezed the other way round lands at theta = pi/2
        let f = factor_pure(&Sym2::diag(1.0 / e2, e2)).unwrap();
        assert_relative_eq!(f.theta, PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn factor_rejects_mixed() {
        match factor_pure(&Sym2::scalar(1.1)) {
            Err(Error::NotPure { det }) => assert_relative_eq!(det, 1.21, max_relative = 1e-14),
            other => panic!("unexpected {other:?}"),
        }
    }

    fn physical_cov() -> impl Strategy<Value = CovMat> {
        (0.0f64..2.0, 0.0f64..PI, 1.0f64..50.0)
            .prop_map(|(r, theta, nu)| SqueezeFactorization { r, theta }.reconstruct() * nu)
    }

    proptest! {
        #[test]
        fn overlap_symmetric_and_bounded(a in physical_cov(), b in physical_cov()) {
            let ab = overlap(&a, &b).unwrap();
            let ba = overlap(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12);
            prop_assert!(ab > 0.0 && ab <= 1.0 + 1e-12);
            prop_assert!((overlap(&a, &a).unwrap() - purity(&a).unwrap()).abs() <= 1e-12);
        }

        #[test]
        fn factorization_round_trips(r in 0.0f64..1.5, theta in 0.0f64..PI) {
            let cov = SqueezeFactorization { r, theta }.reconstruct();
            let f = factor_pure(&cov).unwrap();
            let back = f.reconstruct();
            prop_assert!((back - cov).frobenius() / cov.frobenius() <= 1e-10);
            prop_assert!(f.r >= 0.0 && (0.0..PI).contains(&f.theta));
        }
    }
}
