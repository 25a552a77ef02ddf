//! Physical parameters of the monitored oscillator and the CSL mapping onto
//! the fundamental diffusion rate.
//!
//! All rates (`omega_m`, `gamma_env`, `gamma_fun`) share one unit. Two unit
//! systems are supported and always selected explicitly:
//!
//! * [`UnitSystem::Natural`]: `omega_m = 1` sets the scale and `hbar = 1`.
//! * [`UnitSystem::Si`]: rates in rad/s, `hbar` in J·s.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.0545718e-34;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    #[default]
    Natural,
    Si,
}

impl UnitSystem {
    pub fn default_hbar(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::Si => HBAR_SI,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UnitSystem::Natural => "natural",
            UnitSystem::Si => "si",
        }
    }
}

/// The four rates that define the monitored dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mechanical angular frequency.
    pub omega_m: f64,
    /// Environmental momentum-diffusion rate.
    pub gamma_env: f64,
    /// Fundamental (collapse-induced) momentum-diffusion rate.
    pub gamma_fun: f64,
    /// Monitoring efficiency in `[0, 1]`.
    pub eta: f64,
}

impl PhysicalParams {
    pub fn new(omega_m: f64, gamma_env: f64, gamma_fun: f64, eta: f64) -> Result<Self> {
        let p = Self {
            omega_m,
            gamma_env,
            gamma_fun,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega_m", self.omega_m)?;
        positive("gamma_env", self.gamma_env)?;
        non_negative("gamma_fun", self.gamma_fun)?;
        if !(self.eta.is_finite() && (0.0..=1.0).contains(&self.eta)) {
            return Err(Error::param("eta", format!("must lie in [0, 1], got {}", self.eta)));
        }
        Ok(())
    }

    /// Total momentum diffusion `gamma_env + gamma_fun`.
    pub fn gamma_total(&self) -> f64 {
        self.gamma_env + self.gamma_fun
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn with_gamma_fun(self, gamma_fun: f64) -> Self {
        Self { gamma_fun, ..self }
    }
}

/// Inputs of the CSL model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CslParams {
    /// Collapse rate (1/s).
    pub lambda_csl: f64,
    /// Localization length (m).
    pub r_c: f64,
    /// Mass of the oscillator (kg).
    pub mass: f64,
    /// Geometry factor; defaults to 1.
    pub alpha: f64,
    /// Reduced Planck constant in the active unit system.
    pub hbar: f64,
}

impl CslParams {
    /// SI-unit CSL inputs with `alpha = 1`.
    pub fn si(lambda_csl: f64, r_c: f64, mass: f64) -> Self {
        Self {
            lambda_csl,
            r_c,
            mass,
            alpha: 1.0,
            hbar: HBAR_SI,
        }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("lambda_csl", self.lambda_csl)?;
        positive("r_c", self.r_c)?;
        positive("mass", self.mass)?;
        positive("alpha", self.alpha)?;
        positive("hbar", self.hbar)?;
        Ok(())
    }
}

/// `beta = alpha * hbar * lambda_csl / (m r_c^2)`, the collapse diffusion
/// rate multiplied by the mechanical frequency.
pub fn beta_from_csl(csl: &CslParams) -> Result<f64> {
    csl.validate()?;
    Ok(csl.alpha * csl.hbar * csl.lambda_csl / (csl.mass * csl.r_c * csl.r_c))
}

/// Fundamental diffusion rate induced by CSL on an oscillator of frequency
/// `omega_m`: `beta / omega_m`.
pub fn gamma_fun_from_csl(csl: &CslParams, omega_m: f64) -> Result<f64> {
    positive("omega_m", omega_m)?;
    Ok(beta_from_csl(csl)? / omega_m)
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(field, format!("must be finite and >= 0, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn reference_csl() -> CslParams {
        CslParams {
            lambda_csl: 1e-8,
            r_c: 1e-7,
            mass: 1e-18,
            alpha: 1.0,
            hbar: 1.0546e-34,
        }
    }

    #[test]
    fn zero_collapse_rate_gives_zero() {
        let csl = CslParams {
            lambda_csl: 0.0,
            ..reference_csl()
        };
        assert_eq!(gamma_fun_from_csl(&csl, 3.0).unwrap(), 0.0);
        assert_eq!(beta_from_csl(&csl).unwrap(), 0.0);
    }

    #[test]
    fn doubling_mass_halves_rate() {
        let a = gamma_fun_from_csl(&reference_csl(), 2.0).unwrap();
        let heavy = CslParams {
            mass: 2e-18,
            ..reference_csl()
        };
        let b = gamma_fun_from_csl(&heavy, 2.0).unwrap();
        assert_relative_eq!(a, 2.0 * b, max_relative = 1e-15);
    }

    #[test]
    fn nanosphere_reference_values() {
        // 1.0546e-34 * 1e-8 / (1e-18 * 1e-14) = 1.0546e-10
        let omega = 2.0 * PI * 135e3;
        let beta = beta_from_csl(&reference_csl()).unwrap();
        assert_relative_eq!(beta, 1.0546e-10, max_relative = 1e-12);
        let g = gamma_fun_from_csl(&reference_csl(), omega).unwrap();
        assert_relative_eq!(g, 1.0546e-10 / 848_230.016_469_244_5, max_relative = 1e-9);
        assert!((g - 1.24e-16).abs() < 0.005e-16);
    }

    #[test]
    fn validation_names_offending_field() {
        let bad = CslParams {
            r_c: 0.0,
            ..reference_csl()
        };
        match gamma_fun_from_csl(&bad, 1.0) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "r_c"),
            other => panic!("unexpected {other:?}"),
        }
        match gamma_fun_from_csl(&reference_csl(), -1.0) {
            Err(Error::InvalidParameter { field, .. }) => assert_eq!(field, "omega_m"),
            other => panic!("unexpected {other:?}"),
        }
        for (p, field) in [
            (PhysicalParams::new(0.0, 0.1, 0.0, 1.0), "omega_m"),
            (PhysicalParams::new(1.0, 0.0, 0.0, 1.0), "gamma_env"),
            (PhysicalParams::new(1.0, 0.1, -1e-3, 1.0), "gamma_fun"),
            (PhysicalParams::new(1.0, 0.1, 0.0, 1.5), "eta"),
            (PhysicalParams::new(1.0, 0.1, 0.0, f64::NAN), "eta"),
        ] {
            match p {
                Err(Error::InvalidParameter { field: f, .. }) => assert_eq!(f, field),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    proptest! {
        #[test]
        fn gamma_times_omega_is_beta(
            lambda in 1e-12f64..1e-4,
            r_c in 1e-9f64..1e-5,
            mass in 1e-21f64..1e-12,
            alpha in 0.1f64..10.0,
            omega in 1.0f64..1e7,
        ) {
            let csl = CslParams { lambda_csl: lambda, r_c, mass, alpha, hbar: HBAR_SI };
            let g = gamma_fun_from_csl(&csl, omega).unwrap();
            let beta = beta_from_csl(&csl).unwrap();
            prop_assert!(((g * omega - beta) / beta).abs() <= 1e-12);
        }
    }
}
