//! Subcommand implementations. Each returns the reports to write; nothing
//! touches the filesystem before every value has been computed, so a failing
//! run leaves no partial output behind.

use std::f64::consts::PI;

use unravel_core::config::ParamsSection;
use unravel_core::{Error, UnitSystem};

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::Report;

pub mod figure;
pub mod steady;
pub mod sweep;
pub mod trajectory;

/// One output file. `suffix` is `None` for the primary file; auxiliary files
/// are written next to it as `<stem>.<suffix>.<ext>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub suffix: Option<&'static str>,
    pub report: Report,
}

impl Artifact {
    pub fn primary(report: Report) -> Self {
        Self { suffix: None, report }
    }
}

/// Mechanical frequency of the levitated-nanosphere example, rad/s.
pub const LAB_OMEGA_M: f64 = 2.0 * PI * 135e3;
/// Environmental diffusion rate of the levitated-nanosphere example, 1/s.
pub const LAB_GAMMA_ENV: f64 = 2.0 * PI * 11e3;

/// Dimensionless parameter set used when a configuration leaves keys out.
pub fn natural_defaults() -> ParamsSection {
    ParamsSection {
        units: UnitSystem::Natural,
        omega_m: Some(1.0),
        gamma_env: Some(0.1),
        gamma_fun: Some(0.01),
        eta: Some(1.0),
        csl: None,
    }
}

/// Levitated-nanosphere parameters with `Γ_fun = 1e-5 ω_m`.
pub fn lab_defaults() -> ParamsSection {
    ParamsSection {
        units: UnitSystem::Si,
        omega_m: Some(LAB_OMEGA_M),
        gamma_env: Some(LAB_GAMMA_ENV),
        gamma_fun: Some(1e-5 * LAB_OMEGA_M),
        eta: Some(1.0),
        csl: None,
    }
}

/// Applies `defaults`, taking the default unit system only when the
/// configuration did not name one.
pub(crate) fn fill_params(cfg: &RunConfig, defaults: &ParamsSection) -> ParamsSection {
    let mut own = cfg.params.clone();
    if !cfg.units_explicit {
        own.units = defaults.units;
    }
    own.or(defaults)
}

/// Short machine-readable label for a per-point failure.
pub fn status_of(e: &Error) -> &'static str {
    match e {
        Error::NoSteadyState => "no_steady_state",
        Error::InvalidState { .. } => "invalid_state",
        Error::NotPure { .. } => "not_pure",
        Error::DegeneratePovm { .. } => "degenerate_povm",
        Error::IntegrationFailure { .. } => "integration_failure",
        Error::Overflow(_) => "overflow",
        _ => "error",
    }
}

/// Splits a per-point result: physical-domain failures become a status label,
/// anything else aborts the command.
pub(crate) fn per_point<T>(r: unravel_core::Result<T>) -> Result<std::result::Result<T, &'static str>> {
    match r {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_physical_domain() || matches!(e, Error::Overflow(_)) => Ok(Err(status_of(&e))),
        Err(e) => Err(CliError::from(e)),
    }
}
