//! `steady`: closed-form steady state and its diagnostics at one parameter set.

use unravel_core::dynamics::{detectability, verify_stabilizing};
use unravel_core::{purity, qfi_steady_closed, steady_state_analytic};

use super::{fill_params, natural_defaults, Artifact};
use crate::config::RunConfig;
use crate::error::Result;
use crate::output::{Cell, Report, Table};

pub const COLUMNS: &[&str] = &[
    "omega_m",
    "gamma_env",
    "gamma_fun",
    "eta",
    "sigma_xx",
    "sigma_xp",
    "sigma_pp",
    "det",
    "purity",
    "detectable",
    "stabilizing",
    "H_ss",
    "divergent",
    "status",
];

pub fn run(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let params = fill_params(cfg, &natural_defaults());
    let p = params.resolve()?.physical;
    let cov = steady_state_analytic(&p)?;
    let mu = purity(&cov)?;
    let detectable = detectability(&p)?;
    let stabilizing = verify_stabilizing(&cov, &p)?;
    let h = qfi_steady_closed(&p)?;

    let mut table = Table::new(COLUMNS);
    table.push(vec![
        Cell::Float(p.omega_m),
        Cell::Float(p.gamma_env),
        Cell::Float(p.gamma_fun),
        Cell::Float(p.eta),
        Cell::Float(cov.xx),
        Cell::Float(cov.xp),
        Cell::Float(cov.pp),
        Cell::Float(cov.det()),
        Cell::Float(mu),
        Cell::Bool(detectable),
        Cell::Bool(stabilizing),
        Cell::opt_float(h.finite_value()),
        Cell::Bool(h.divergent),
        Cell::text(if h.divergent { "divergent" } else { "ok" }),
    ]);

    let resolved = RunConfig {
        params,
        ..Default::default()
    };
    Ok(vec![Artifact::primary(Report {
        command: "steady".into(),
        warnings: Vec::new(),
        config: resolved.to_toml(),
        table,
    })])
}
