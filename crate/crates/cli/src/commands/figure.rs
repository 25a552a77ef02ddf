//! `figure N`: data behind the four published figures.

use rayon::prelude::*;
use unravel_core::config::ParamsSection;
use unravel_core::dynamics::{default_dt, StepPlan};
use unravel_core::estimation::qfi_time_series;
use unravel_core::{
    gamma_fun_from_csl, povm_fi, qfi_steady_closed, runs_for_unit_snr, PhysicalParams, PovmSpec, QfiResult, UnitSystem,
};

use super::{per_point, Artifact, LAB_GAMMA_ENV, LAB_OMEGA_M};
use crate::config::{linspace, FigureSection, IntegratorSection, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Report, Table};

pub const FIG1_COLUMNS: &[&str] = &["eta", "gamma_fun", "H_ss", "divergent", "status"];
pub const FIG2_COLUMNS: &[&str] = &["eta", "gamma_ratio", "FI", "QFI", "ratio", "status"];
pub const FIG3_COLUMNS: &[&str] = &["eta", "lambda_csl", "gamma_fun", "M_runs", "status"];
pub const FIG4_COLUMNS: &[&str] = &["t", "eta", "H_t", "H_ss", "ratio", "status"];

/// `λ_csl` at which the default figure 3 parameters are anchored.
pub const FIG3_ANCHOR_LAMBDA: f64 = 1e-8;
/// Default `Γ_env/Γ_fun` at the anchor: makes `4(Γ_env+Γ_fun)²/Γ_fun²`, the
/// run count as `η → 0⁺`, equal to 10⁶.
pub const FIG3_ANCHOR_ENV_RATIO: f64 = 499.0;
pub const FIG3_BANNER: &str = "gamma_fun per lambda_csl is backed out so that the eta->0 run count is 1e6 at \
     lambda_csl=1e-8 and scaled linearly in lambda_csl; absolute counts depend on the undocumented \
     sphere mass and geometry factor";

pub fn run(n: u8, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let report = match n {
        1 => fig1(cfg)?,
        2 => fig2(cfg)?,
        3 => fig3(cfg)?,
        4 => fig4(cfg)?,
        _ => return Err(CliError::Config(format!("no figure {n}; expected 1, 2, 3 or 4"))),
    };
    Ok(vec![Artifact::primary(report)])
}

fn grid(min: f64, max: f64, points: usize, what: &str) -> Result<Vec<f64>> {
    if points == 0 {
        return Err(CliError::Config(format!("{what}: point count must be >= 1")));
    }
    if !(min.is_finite() && max.is_finite()) {
        return Err(CliError::Config(format!("{what}: bounds must be finite")));
    }
    Ok(linspace(min, max, points))
}

fn params(omega_m: f64, gamma_env: f64, gamma_fun: f64, eta: f64) -> Result<PhysicalParams> {
    Ok(PhysicalParams::new(omega_m, gamma_env, gamma_fun, eta)?)
}

fn units(cfg: &RunConfig, default: UnitSystem) -> UnitSystem {
    if cfg.units_explicit {
        cfg.params.units
    } else {
        default
    }
}

fn qfi_cells(h: &QfiResult) -> (Cell, &'static str) {
    (
        Cell::opt_float(h.finite_value()),
        if h.divergent { "divergent" } else { "ok" },
    )
}

fn fig1(cfg: &RunConfig) -> Result<Report> {
    let f = cfg.figure();
    let omega_m = cfg.params.omega_m.unwrap_or(1.0);
    let gamma_env = cfg.params.gamma_env.unwrap_or(0.1 * omega_m);
    let gamma_funs = f
        .gamma_fun_values
        .clone()
        .or_else(|| cfg.params.gamma_fun.map(|g| vec![g]))
        .unwrap_or_else(|| vec![omega_m / 100.0, omega_m / 40.0, omega_m / 20.0]);
    let (eta_min, eta_max, eta_points) = (
        f.eta_min.unwrap_or(0.01),
        f.eta_max.unwrap_or(1.0),
        f.eta_points.unwrap_or(100),
    );
    let etas = grid(eta_min, eta_max, eta_points, "eta axis")?;

    let points: Vec<(f64, f64)> = gamma_funs
        .iter()
        .flat_map(|&g| etas.iter().map(move |&e| (g, e)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(g, eta)| {
            let p = params(omega_m, gamma_env, g, eta)?;
            Ok(match per_point(qfi_steady_closed(&p))? {
                Ok(h) => {
                    let (v, status) = qfi_cells(&h);
                    vec![
                        Cell::Float(eta),
                        Cell::Float(g),
                        v,
                        Cell::Bool(h.divergent),
                        Cell::text(status),
                    ]
                }
                Err(status) => vec![
                    Cell::Float(eta),
                    Cell::Float(g),
                    Cell::Empty,
                    Cell::Bool(false),
                    Cell::text(status),
                ],
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let resolved = RunConfig {
        params: ParamsSection {
            units: units(cfg, UnitSystem::Natural),
            omega_m: Some(omega_m),
            gamma_env: Some(gamma_env),
            ..Default::default()
        },
        figure: Some(FigureSection {
            eta_min: Some(eta_min),
            eta_max: Some(eta_max),
            eta_points: Some(eta_points),
            gamma_fun_values: Some(gamma_funs),
            ..Default::default()
        }),
        ..Default::default()
    };
    Ok(report("figure 1", FIG1_COLUMNS, rows, Vec::new(), &resolved))
}

fn fig2(cfg: &RunConfig) -> Result<Report> {
    let f = cfg.figure();
    let omega_m = cfg.params.omega_m.unwrap_or(1.0);
    let gamma_env = cfg.params.gamma_env.unwrap_or(0.1 * omega_m);
    let (eta_min, eta_max, eta_points) = (
        f.eta_min.unwrap_or(0.05),
        f.eta_max.unwrap_or(1.0),
        f.eta_points.unwrap_or(20),
    );
    let (ratio_min, ratio_max, ratio_points) = (
        f.ratio_min.unwrap_or(0.02),
        f.ratio_max.unwrap_or(1.0),
        f.ratio_points.unwrap_or(50),
    );
    let etas = grid(eta_min, eta_max, eta_points, "eta axis")?;
    let ratios = grid(ratio_min, ratio_max, ratio_points, "ratio axis")?;
    let spec = PovmSpec::optimal_at_zero_collapse(&params(omega_m, gamma_env, 0.0, 1.0)?)?;

    let points: Vec<(f64, f64)> = etas.iter().flat_map(|&e| ratios.iter().map(move |&r| (e, r))).collect();
    let rows = points
        .par_iter()
        .map(|&(eta, ratio)| {
            let p = params(omega_m, gamma_env, ratio * gamma_env, eta)?;
            let qfi = per_point(qfi_steady_closed(&p))?;
            let fi = per_point(povm_fi(&p, &spec))?;
            let qfi_value = qfi.ok().and_then(|h| h.finite_value());
            let fi_value = fi.ok();
            let status = match (&qfi, &fi) {
                (Err(s), _) | (_, Err(s)) => *s,
                (Ok(h), _) if h.divergent => "divergent",
                _ => "ok",
            };
            let r = match (fi_value, qfi_value) {
                (Some(a), Some(b)) => Some(a / b),
                _ => None,
            };
            Ok(vec![
                Cell::Float(eta),
                Cell::Float(ratio),
                Cell::opt_float(fi_value),
                Cell::opt_float(qfi_value),
                Cell::opt_float(r),
                Cell::text(status),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let resolved = RunConfig {
        params: ParamsSection {
            units: units(cfg, UnitSystem::Natural),
            omega_m: Some(omega_m),
            gamma_env: Some(gamma_env),
            ..Default::default()
        },
        figure: Some(FigureSection {
            eta_min: Some(eta_min),
            eta_max: Some(eta_max),
            eta_points: Some(eta_points),
            ratio_min: Some(ratio_min),
            ratio_max: Some(ratio_max),
            ratio_points: Some(ratio_points),
            ..Default::default()
        }),
        ..Default::default()
    };
    Ok(report("figure 2", FIG2_COLUMNS, rows, Vec::new(), &resolved))
}

/// `Γ_fun` for the default figure 3 curve at `lambda_csl`.
pub fn fig3_backed_out_gamma_fun(gamma_env: f64, lambda_csl: f64) -> f64 {
    gamma_env / FIG3_ANCHOR_ENV_RATIO * (lambda_csl / FIG3_ANCHOR_LAMBDA)
}

fn fig3(cfg: &RunConfig) -> Result<Report> {
    let f = cfg.figure();
    let units = units(cfg, UnitSystem::Si);
    let omega_m = cfg.params.omega_m.unwrap_or(LAB_OMEGA_M);
    let gamma_env = cfg.params.gamma_env.unwrap_or(LAB_GAMMA_ENV);
    let lambdas = f.lambda_csl.clone().unwrap_or_else(|| vec![1e-10, 1e-8, 1e-6]);
    let (eta_min, eta_max, eta_points) = (
        f.eta_min.unwrap_or(0.0),
        f.eta_max.unwrap_or(1.0),
        f.eta_points.unwrap_or(101),
    );
    let etas = grid(eta_min, eta_max, eta_points, "eta axis")?;

    let mut warnings = Vec::new();
    let gamma_funs: Vec<f64> = match (&f.gamma_fun_per_lambda, &cfg.params.csl) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either figure.gamma_fun_per_lambda or a [csl] block, not both".into(),
            ))
        }
        (Some(table), None) => {
            if table.len() != lambdas.len() {
                return Err(CliError::Config(format!(
                    "figure.gamma_fun_per_lambda has {} entries for {} lambda_csl values",
                    table.len(),
                    lambdas.len()
                )));
            }
            table.clone()
        }
        (None, Some(csl)) => lambdas
            .iter()
            .map(|&l| {
                let mut c = csl.to_params(units);
                c.lambda_csl = l;
                Ok(gamma_fun_from_csl(&c, omega_m)?)
            })
            .collect::<Result<_>>()?,
        (None, None) => {
            warnings.push(FIG3_BANNER.to_string());
            lambdas
                .iter()
                .map(|&l| fig3_backed_out_gamma_fun(gamma_env, l))
                .collect()
        }
    };

    let points: Vec<(f64, f64, f64)> = lambdas
        .iter()
        .zip(&gamma_funs)
        .flat_map(|(&l, &g)| etas.iter().map(move |&e| (l, g, e)))
        .collect();
    let rows = points
        .par_iter()
        .map(|&(lambda, g, eta)| {
            let p = params(omega_m, gamma_env, g, eta)?;
            let (runs, status) = match per_point(runs_for_unit_snr(&p))? {
                Ok(m) => (Cell::Int(m), "ok"),
                Err(s) => (Cell::Empty, s),
            };
            Ok(vec![
                Cell::Float(eta),
                Cell::Float(lambda),
                Cell::Float(g),
                runs,
                Cell::text(status),
            ])
        })
        .collect::<Result<Vec<_>>>()?;

    let resolved = RunConfig {
        params: ParamsSection {
            units,
            omega_m: Some(omega_m),
            gamma_env: Some(gamma_env),
            csl: cfg.params.csl.clone(),
            ..Default::default()
        },
        figure: Some(FigureSection {
            eta_min: Some(eta_min),
            eta_max: Some(eta_max),
            eta_points: Some(eta_points),
            lambda_csl: Some(lambdas),
            gamma_fun_per_lambda: f.gamma_fun_per_lambda.clone(),
            ..Default::default()
        }),
        ..Default::default()
    };
    Ok(report("figure 3", FIG3_COLUMNS, rows, warnings, &resolved))
}

fn fig4(cfg: &RunConfig) -> Result<Report> {
    let f = cfg.figure();
    let units = units(cfg, UnitSystem::Si);
    let omega_m = cfg.params.omega_m.unwrap_or(LAB_OMEGA_M);
    let gamma_env = cfg.params.gamma_env.unwrap_or(LAB_GAMMA_ENV);
    let gamma_fun = match (cfg.params.gamma_fun, &cfg.params.csl) {
        (Some(_), Some(_)) => {
            return Err(CliError::Config(
                "give either `gamma_fun` or a [csl] block, not both".into(),
            ))
        }
        (Some(g), None) => g,
        (None, Some(csl)) => gamma_fun_from_csl(&csl.to_params(units), omega_m)?,
        (None, None) => 1e-5 * omega_m,
    };
    let etas = f.etas.clone().unwrap_or_else(|| vec![0.5, 1.0]);
    let n_th = f.n_th.unwrap_or(100.0);
    let t_max = f.t_max.unwrap_or(150e-6);
    let sample_interval = f.sample_interval.unwrap_or(0.5e-6);
    let dt = cfg
        .integrator
        .as_ref()
        .and_then(|i| i.dt)
        .unwrap_or_else(|| default_dt(omega_m));
    if !(t_max.is_finite() && t_max > 0.0 && sample_interval.is_finite() && sample_interval > 0.0) {
        return Err(CliError::Config(
            "figure.t_max and figure.sample_interval must be finite and > 0".into(),
        ));
    }
    let n_samples = (t_max / sample_interval).round().max(1.0) as usize;
    let stride = StepPlan::new(sample_interval, dt, omega_m)?;

    let curves = etas
        .par_iter()
        .map(|&eta| {
            let p = params(omega_m, gamma_env, gamma_fun, eta)?;
            let h_ss = per_point(qfi_steady_closed(&p))?;
            let series = per_point(qfi_time_series(
                &p,
                n_th,
                stride.h,
                stride.n_steps * n_samples,
                stride.n_steps,
            ))?;
            let mut rows = Vec::new();
            match series {
                Ok(series) => {
                    for (t, h_t) in series {
                        let h_t_value = h_t.finite_value();
                        let h_ss_value = h_ss.ok().and_then(|h| h.finite_value());
                        let status = match (&h_ss, h_t.divergent) {
                            (Err(s), _) => *s,
                            (Ok(h), d) if h.divergent || d => "divergent",
                            _ => "ok",
                        };
                        let ratio = match (h_t_value, h_ss_value) {
                            (Some(a), Some(b)) => Some(a / b),
                            _ => None,
                        };
                        rows.push(vec![
                            Cell::Float(t),
                            Cell::Float(eta),
                            Cell::opt_float(h_t_value),
                            Cell::opt_float(h_ss_value),
                            Cell::opt_float(ratio),
                            Cell::text(status),
                        ]);
                    }
                }
                Err(status) => rows.push(vec![
                    Cell::Float(0.0),
                    Cell::Float(eta),
                    Cell::Empty,
                    Cell::opt_float(h_ss.ok().and_then(|h| h.finite_value())),
                    Cell::Empty,
                    Cell::text(status),
                ]),
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;

    let resolved = RunConfig {
        params: ParamsSection {
            units,
            omega_m: Some(omega_m),
            gamma_env: Some(gamma_env),
            gamma_fun: cfg.params.csl.is_none().then_some(gamma_fun),
            csl: cfg.params.csl.clone(),
            ..Default::default()
        },
        integrator: Some(IntegratorSection { dt: Some(dt) }),
        figure: Some(FigureSection {
            etas: Some(etas),
            n_th: Some(n_th),
            t_max: Some(t_max),
            sample_interval: Some(sample_interval),
            ..Default::default()
        }),
        ..Default::default()
    };
    Ok(report(
        "figure 4",
        FIG4_COLUMNS,
        curves.into_iter().flatten().collect(),
        Vec::new(),
        &resolved,
    ))
}

fn report(command: &str, columns: &[&str], rows: Vec<Vec<Cell>>, warnings: Vec<String>, cfg: &RunConfig) -> Report {
    let mut table = Table::new(columns);
    for row in rows {
        table.push(row);
    }
    Report {
        command: command.into(),
        warnings,
        config: cfg.to_toml(),
        table,
    }
}
