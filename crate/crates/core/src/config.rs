//! Plain-text parameter files.
//!
//! Parameter sets are TOML documents:
//!
//! ```toml
//! units = "natural"      # or "si"
//! omega_m = 1.0
//! gamma_env = 0.1
//! gamma_fun = 0.01       # or leave out and give a [csl] block
//! eta = 1.0
//!
//! [csl]
//! lambda_csl = 1e-8
//! r_c = 1e-7
//! mass = 1e-18
//! alpha = 1.0            # optional, default 1
//! hbar = 1.0545718e-34   # optional, default follows `units`
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{gamma_fun_from_csl, CslParams, PhysicalParams, UnitSystem};

/// Top-level keys understood by [`ParamsSection`].
pub const PARAM_KEYS: &[&str] = &["units", "omega_m", "gamma_env", "gamma_fun", "eta", "csl"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamsSection {
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_env: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_fun: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csl: Option<CslSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CslSection {
    pub lambda_csl: f64,
    pub r_c: f64,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
}

impl CslSection {
    pub fn to_params(&self, units: UnitSystem) -> CslParams {
        CslParams {
            lambda_csl: self.lambda_csl,
            r_c: self.r_c,
            mass: self.mass,
            alpha: self.alpha.unwrap_or(1.0),
            hbar: self.hbar.unwrap_or_else(|| units.default_hbar()),
        }
    }
}

/// Fully validated parameter set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedParams {
    pub units: UnitSystem,
    pub physical: PhysicalParams,
    pub csl: Option<CslParams>,
}

impl ParamsSection {
    /// Parses a document holding only parameter keys.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        if let Some(key) = table.keys().find(|k| !PARAM_KEYS.contains(&k.as_str())) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    /// Fills unset entries from `defaults`. The unit system of `self` is kept.
    pub fn or(&self, defaults: &ParamsSection) -> ParamsSection {
        ParamsSection {
            units: self.units,
            omega_m: self.omega_m.or(defaults.omega_m),
            gamma_env: self.gamma_env.or(defaults.gamma_env),
            gamma_fun: self
                .gamma_fun
                .or(if self.csl.is_some() { None } else { defaults.gamma_fun }),
            eta: self.eta.or(defaults.eta),
            csl: self.csl.clone().or_else(|| defaults.csl.clone()),
        }
    }

    pub fn resolve(&self) -> Result<ResolvedParams> {
        let need = |v: Option<f64>, key: &str| v.ok_or_else(|| Error::Config(format!("missing key `{key}`")));
        let omega_m = need(self.omega_m, "omega_m")?;
        let gamma_env = need(self.gamma_env, "gamma_env")?;
        let eta = need(self.eta, "eta")?;
        let csl = self.csl.as_ref().map(|c| c.to_params(self.units));
        if let Some(c) = &csl {
            c.validate()?;
        }
        let gamma_fun = match (self.gamma_fun, &csl) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give either `gamma_fun` or a [csl] block, not both".into(),
                ))
            }
            (Some(g), None) => g,
            (None, Some(c)) => gamma_fun_from_csl(c, omega_m)?,
            (None, None) => return Err(Error::Config("missing key `gamma_fun` (or a [csl] block)".into())),
        };
        Ok(ResolvedParams {
            units: self.units,
            physical: PhysicalParams::new(omega_m, gamma_env, gamma_fun, eta)?,
            csl,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::HBAR_SI;

    #[test]
    fn parses_natural_units() {
        let s = ParamsSection::from_toml_str(
            "units = \"natural\"\nomega_m = 1.0\ngamma_env = 0.1\ngamma_fun = 0.01\neta = 1.0\n",
        )
        .unwrap();
        let r = s.resolve().unwrap();
        assert_eq!(r.units, UnitSystem::Natural);
        assert_eq!(r.physical, PhysicalParams::new(1.0, 0.1, 0.01, 1.0).unwrap());
        assert!(r.csl.is_none());
    }

    #[test]
    fn csl_block_sets_gamma_fun() {
        let s = ParamsSection::from_toml_str(
            "units = \"si\"\nomega_m = 848230.0\ngamma_env = 69115.0\neta = 0.5\n\
             [csl]\nlambda_csl = 1e-8\nr_c = 1e-7\nmass = 1e-18\n",
        )
        .unwrap();
        let r = s.resolve().unwrap();
        let csl = r.csl.unwrap();
        assert_eq!(csl.hbar, HBAR_SI);
        assert_eq!(csl.alpha, 1.0);
        assert_eq!(r.physical.gamma_fun, gamma_fun_from_csl(&csl, 848230.0).unwrap());
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(ParamsSection::from_toml_str("omega_m = ").is_err());
        assert!(ParamsSection::from_toml_str("omega = 1.0").is_err());
        assert!(ParamsSection::from_toml_str("units = \"imperial\"").is_err());
        let both = ParamsSection::from_toml_str(
            "omega_m = 1.0\ngamma_env = 0.1\ngamma_fun = 0.01\neta = 1.0\n[csl]\nlambda_csl = 1.0\nr_c = 1.0\nmass = 1.0\n",
        )
        .unwrap();
        assert!(matches!(both.resolve(), Err(Error::Config(_))));
        let missing = ParamsSection::from_toml_str("omega_m = 1.0\n").unwrap();
        assert!(matches!(missing.resolve(), Err(Error::Config(_))));
        let bad_eta =
            ParamsSection::from_toml_str("omega_m = 1.0\ngamma_env = 0.1\ngamma_fun = 0.0\neta = 2.0\n").unwrap();
        assert!(matches!(
            bad_eta.resolve(),
            Err(Error::InvalidParameter { field: "eta", .. })
        ));
    }

    #[test]
    fn defaults_fill_gaps() {
        let defaults = ParamsSection {
            omega_m: Some(1.0),
            gamma_env: Some(0.1),
            gamma_fun: Some(0.01),
            eta: Some(1.0),
            ..Default::default()
        };
        let user = ParamsSection {
            eta: Some(0.3),
            ..Default::default()
        };
        let r = user.or(&defaults).resolve().unwrap();
        assert_eq!(r.physical.eta, 0.3);
        assert_eq!(r.physical.gamma_fun, 0.01);
    }
}
