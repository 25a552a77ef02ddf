//! `sweep`: Cartesian grid over physical and CSL parameters.
//!
//! Points are evaluated in parallel and written in grid order, the first
//! axis varying slowest.

use rayon::prelude::*;
use unravel_core::config::ParamsSection;
use unravel_core::{
    povm_fi, purity, qfi_steady_closed, runs_for_unit_snr, steady_state_analytic, PhysicalParams, PovmSpec,
};

use super::{fill_params, natural_defaults, per_point, Artifact};
use crate::config::{RunConfig, SweepSection};
use crate::error::{CliError, Result};
use crate::output::{Cell, Report, Table};

pub const PHYSICAL_AXES: &[&str] = &["omega_m", "gamma_env", "gamma_fun", "eta"];
pub const CSL_AXES: &[&str] = &["lambda_csl", "r_c", "mass", "alpha", "hbar"];

/// Columns after the CSL axis columns.
pub const COLUMNS: &[&str] = &[
    "omega_m",
    "gamma_env",
    "gamma_fun",
    "eta",
    "sigma_xx",
    "sigma_xp",
    "sigma_pp",
    "purity",
    "H_ss",
    "divergent",
    "FI",
    "M_runs",
    "status",
];

fn set_axis(params: &mut ParamsSection, name: &str, v: f64) {
    match name {
        "omega_m" => params.omega_m = Some(v),
        "gamma_env" => params.gamma_env = Some(v),
        "gamma_fun" => params.gamma_fun = Some(v),
        "eta" => params.eta = Some(v),
        _ => {
            let csl = params.csl.as_mut().expect("CSL axes require a [csl] block");
            match name {
                "lambda_csl" => csl.lambda_csl = v,
                "r_c" => csl.r_c = v,
                "mass" => csl.mass = v,
                "alpha" => csl.alpha = Some(v),
                "hbar" => csl.hbar = Some(v),
                _ => unreachable!("axis names are validated"),
            }
        }
    }
}

fn validate_axes(sweep: &SweepSection, base: &ParamsSection) -> Result<()> {
    if sweep.axes.is_empty() {
        return Err(CliError::Config("[sweep] needs at least one axis".into()));
    }
    for (i, axis) in sweep.axes.iter().enumerate() {
        let name = axis.name.as_str();
        if !PHYSICAL_AXES.contains(&name) && !CSL_AXES.contains(&name) {
            return Err(CliError::Config(format!(
                "unknown sweep axis `{name}`; expected one of {:?} or {:?}",
                PHYSICAL_AXES, CSL_AXES
            )));
        }
        if CSL_AXES.contains(&name) && base.csl.is_none() {
            return Err(CliError::Config(format!("sweep axis `{name}` needs a [csl] block")));
        }
        if name == "gamma_fun" && base.csl.is_some() {
            return Err(CliError::Config(
                "sweep axis `gamma_fun` conflicts with the [csl] block".into(),
            ));
        }
        if sweep.axes[..i].iter().any(|a| a.name == axis.name) {
            return Err(CliError::Config(format!("sweep axis `{name}` given twice")));
        }
    }
    Ok(())
}

/// All grid points, first axis slowest.
fn cartesian(values: &[Vec<f64>]) -> Vec<Vec<f64>> {
    values.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

fn evaluate(p: &PhysicalParams) -> Result<Vec<Cell>> {
    let mut cells = vec![
        Cell::Float(p.omega_m),
        Cell::Float(p.gamma_env),
        Cell::Float(p.gamma_fun),
        Cell::Float(p.eta),
    ];
    let cov = match per_point(steady_state_analytic(p))? {
        Ok(c) => c,
        Err(status) => {
            cells.extend((0..8).map(|i| if i == 5 { Cell::Bool(false) } else { Cell::Empty }));
            cells.push(Cell::text(status));
            return Ok(cells);
        }
    };
    let mu = purity(&cov)?;
    let h = qfi_steady_closed(p)?;
    let spec = PovmSpec::optimal_at_zero_collapse(p)?;
    let fi = per_point(povm_fi(p, &spec))?;
    let runs = if p.gamma_fun > 0.0 {
        per_point(runs_for_unit_snr(p))?.ok()
    } else {
        None
    };
    let status = match (&fi, h.divergent) {
        (_, true) => "divergent",
        (Err(s), _) => *s,
        _ => "ok",
    };
    cells.extend([
        Cell::Float(cov.xx),
        Cell::Float(cov.xp),
        Cell::Float(cov.pp),
        Cell::Float(mu),
        Cell::opt_float(h.finite_value()),
        Cell::Bool(h.divergent),
        Cell::opt_float(fi.ok()),
        Cell::opt_int(runs),
        Cell::text(status),
    ]);
    Ok(cells)
}

pub fn run(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let sweep = cfg
        .sweep
        .clone()
        .ok_or_else(|| CliError::Config("sweep needs a [sweep] section with `axes`".into()))?;
    let base = fill_params(cfg, &natural_defaults());
    validate_axes(&sweep, &base)?;
    let values = sweep.axes.iter().map(|a| a.values()).collect::<Result<Vec<_>>>()?;
    let csl_axes: Vec<&str> = sweep
        .axes
        .iter()
        .map(|a| a.name.as_str())
        .filter(|n| CSL_AXES.contains(n))
        .collect();

    let points = cartesian(&values);
    let rows = points
        .par_iter()
        .map(|point| {
            let mut params = base.clone();
            for (axis, &v) in sweep.axes.iter().zip(point) {
                set_axis(&mut params, &axis.name, v);
            }
            let resolved = params.resolve()?;
            let mut row: Vec<Cell> = sweep
                .axes
                .iter()
                .zip(point)
                .filter(|(a, _)| CSL_AXES.contains(&a.name.as_str()))
                .map(|(_, &v)| Cell::Float(v))
                .collect();
            row.extend(evaluate(&resolved.physical)?);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;

    let columns: Vec<&str> = csl_axes.iter().copied().chain(COLUMNS.iter().copied()).collect();
    let mut table = Table::new(&columns);
    for row in rows {
        table.push(row);
    }
    let resolved = RunConfig {
        params: base,
        sweep: Some(sweep),
        ..Default::default()
    };
    Ok(vec![Artifact::primary(Report {
        command: "sweep".into(),
        warnings: Vec::new(),
        config: resolved.to_toml(),
        table,
    })])
}
