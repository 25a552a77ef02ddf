use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("unphysical covariance matrix (det = {det}, entries xx={xx}, xp={xp}, pp={pp})")]
    InvalidState { det: f64, xx: f64, xp: f64, pp: f64 },

    #[error("covariance matrix is not pure: det = {det}")]
    NotPure { det: f64 },

    #[error("no steady state exists for eta = 0 (unmonitored dynamics has no damping)")]
    NoSteadyState,

    #[error("step size guard violated: dt * omega_m = {product} exceeds {limit}")]
    StepGuard { product: f64, limit: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("degenerate POVM: outcome probability p0 = {p0} makes the Fisher information undefined")]
    DegeneratePovm { p0: f64 },

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("requested storage overflows: {0}")]
    Overflow(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// True for errors that stem from the physics of the requested point
    /// (no steady state, unphysical state, degenerate measurement) rather than
    /// from a malformed request.
    pub fn is_physical_domain(&self) -> bool {
        matches!(
            self,
            Error::NoSteadyState
                | Error::InvalidState { .. }
                | Error::NotPure { .. }
                | Error::DegeneratePovm { .. }
                | Error::IntegrationFailure { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
