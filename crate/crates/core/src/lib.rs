//! Estimation of the collapse-model momentum diffusion of a continuously
//! monitored mechanical oscillator.
//!
//! The oscillator is described by a zero-mean Gaussian state whose covariance
//! follows a deterministic Riccati flow under monitoring of efficiency `η`.
//! From the steady state (or the state at a finite time) the crate evaluates
//! the quantum Fisher information for the fundamental diffusion rate
//! `Γ_fun`, the classical Fisher information of a dichotomic projective
//! measurement, signal-to-noise bounds and the number of runs needed to
//! resolve `Γ_fun`.
//!
//! Covariances use the anticommutator convention in which the vacuum is the
//! identity; see [`gaussian`].

pub mod config;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod gaussian;
pub mod params;
pub mod trajectory;

pub use dynamics::{
    build_matrices, detectability, integrate_lyapunov, integrate_riccati, integrate_sensitivity, riccati_rhs,
    steady_state_analytic, verify_stabilizing, ModelMatrices, SensitivityPair,
};
pub use error::{Error, Result};
pub use estimation::{
    dcov_steady, povm_fi, qfi_eta1, qfi_finite_time, qfi_gaussian, qfi_steady_closed, runs_for_unit_snr, snr_bound,
    snr_csl_eta1, PovmSpec, QfiResult,
};
pub use gaussian::{factor_pure, is_physical, overlap, purity, CovMat, GaussianState, SqueezeFactorization, Sym2};
pub use params::{beta_from_csl, gamma_fun_from_csl, CslParams, PhysicalParams, UnitSystem};
pub use trajectory::{ensemble_moments, simulate, TrajectoryConfig, TrajectoryResult};
