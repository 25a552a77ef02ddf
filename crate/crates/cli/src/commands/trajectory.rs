//! `trajectory`: Monte-Carlo ensemble of conditional means and the
//! law-of-total-variance comparison against the unconditional flow.

use unravel_core::dynamics::{default_dt, StepPlan};
use unravel_core::trajectory::{ensemble_moments, total_variance_checks};
use unravel_core::{simulate, GaussianState, TrajectoryConfig};

use super::{fill_params, lab_defaults, Artifact};
use crate::config::{IntegratorSection, RunConfig, TrajectorySection};
use crate::error::{CliError, Result};
use crate::output::{Cell, Report, Table};

pub const DEFAULT_N_TRAJ: usize = 10_000;
pub const DEFAULT_T_FINAL: f64 = 20e-6;
pub const DEFAULT_CHECKPOINTS: usize = 5;
pub const DEFAULT_N_TH: f64 = 100.0;

pub const SUMMARY_COLUMNS: &[&str] = &[
    "t",
    "sigma_xx",
    "sigma_xp",
    "sigma_pp",
    "mean_x",
    "mean_p",
    "second_xx",
    "second_xp",
    "second_pp",
    "predicted_xx",
    "predicted_xp",
    "predicted_pp",
    "observed_xx",
    "observed_xp",
    "observed_pp",
    "z_xx",
    "z_xp",
    "z_pp",
    "max_mean_norm",
];
pub const DUMP_COLUMNS: &[&str] = &["traj_id", "step", "t", "x_mean", "p_mean"];
pub const DUMP_RECORD_COLUMNS: &[&str] = &["traj_id", "step", "t", "x_mean", "p_mean", "dy1", "dy2"];

/// Suffix of the per-trajectory dump next to the summary file.
pub const DUMP_SUFFIX: &str = "dump";

pub fn run(cfg: &RunConfig, seed_override: Option<u64>) -> Result<Vec<Artifact>> {
    let params = fill_params(cfg, &lab_defaults());
    let p = params.resolve()?.physical;
    let t = cfg.trajectory.clone().unwrap_or_default();
    let section = TrajectorySection {
        n_traj: Some(t.n_traj.unwrap_or(DEFAULT_N_TRAJ)),
        t_final: Some(t.t_final.unwrap_or(DEFAULT_T_FINAL)),
        checkpoints: Some(t.checkpoints.unwrap_or(DEFAULT_CHECKPOINTS)),
        seed: Some(seed_override.or(t.seed).unwrap_or(0)),
        feedback: Some(t.feedback.unwrap_or(false)),
        record_output: Some(t.record_output.unwrap_or(false)),
        n_th: Some(t.n_th.unwrap_or(DEFAULT_N_TH)),
        dump_trajectories: Some(t.dump_trajectories.unwrap_or(0)),
    };
    let dt = cfg
        .integrator
        .as_ref()
        .and_then(|i| i.dt)
        .unwrap_or_else(|| default_dt(p.omega_m));

    let n_traj = section.n_traj.unwrap();
    let t_final = section.t_final.unwrap();
    let checkpoints = section.checkpoints.unwrap();
    let n_th = section.n_th.unwrap();
    let dump = section.dump_trajectories.unwrap();
    if checkpoints == 0 {
        return Err(CliError::Config("trajectory.checkpoints must be >= 1".into()));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(CliError::Config("trajectory.t_final must be finite and > 0".into()));
    }
    // Steps per checkpoint interval, with the step shrunk so that the
    // interval is an integer number of steps.
    let plan = StepPlan::new(t_final / checkpoints as f64, dt, p.omega_m)?;
    let per_checkpoint = plan.n_steps.max(1);
    let h = t_final / (per_checkpoint * checkpoints) as f64;

    let state0 = GaussianState::thermal(n_th)?;
    let mut tc = TrajectoryConfig::new(h, per_checkpoint * checkpoints, n_traj, section.seed.unwrap());
    tc.feedback = section.feedback.unwrap();
    tc.record_output = section.record_output.unwrap();
    tc.sample_every = per_checkpoint;
    let result = simulate(&p, &state0, &tc)?;
    let checks = total_variance_checks(&result, &p, &state0)?;

    let mut summary = Table::new(SUMMARY_COLUMNS);
    for (k, check) in checks.iter().enumerate() {
        let mom = ensemble_moments(&result, k)?;
        let cov = result.cov_path[k];
        let max_norm = (0..result.n_traj)
            .map(|i| result.means(i)[k].norm())
            .fold(0.0, f64::max);
        summary.push(vec![
            Cell::Float(check.t),
            Cell::Float(cov.xx),
            Cell::Float(cov.xp),
            Cell::Float(cov.pp),
            Cell::Float(mom.mean.x),
            Cell::Float(mom.mean.y),
            Cell::Float(mom.second.xx),
            Cell::Float(mom.second.xp),
            Cell::Float(mom.second.pp),
            Cell::Float(check.predicted.xx),
            Cell::Float(check.predicted.xp),
            Cell::Float(check.predicted.pp),
            Cell::Float(check.observed.xx),
            Cell::Float(check.observed.xp),
            Cell::Float(check.observed.pp),
            Cell::Float(check.z.xx),
            Cell::Float(check.z.xp),
            Cell::Float(check.z.pp),
            Cell::Float(max_norm),
        ]);
    }

    let mut warnings = Vec::new();
    if tc.feedback {
        warnings.push(
            "feedback resets the conditional mean each step; the unconditional comparison columns do not apply".into(),
        );
    }
    let resolved = RunConfig {
        params,
        integrator: Some(IntegratorSection { dt: Some(dt) }),
        trajectory: Some(section),
        ..Default::default()
    };
    let config = resolved.to_toml();
    let mut artifacts = vec![Artifact::primary(Report {
        command: "trajectory".into(),
        warnings: warnings.clone(),
        config: config.clone(),
        table: summary,
    })];

    if dump > 0 {
        // Trajectory `i` uses random stream `i`, so a smaller ensemble
        // sampled at every step reproduces the first trajectories exactly.
        let mut dc = tc;
        dc.n_traj = dump.min(n_traj);
        dc.sample_every = 1;
        let detail = simulate(&p, &state0, &dc)?;
        let mut table = Table::new(if dc.record_output {
            DUMP_RECORD_COLUMNS
        } else {
            DUMP_COLUMNS
        });
        for i in 0..detail.n_traj {
            let means = detail.means(i);
            let record = detail.record(i);
            for (k, m) in means.iter().enumerate() {
                let mut row = vec![
                    Cell::Int(i as u64),
                    Cell::Int(detail.sample_steps[k] as u64),
                    Cell::Float(detail.time(k)),
                    Cell::Float(m.x),
                    Cell::Float(m.y),
                ];
                if let Some(r) = record {
                    row.push(Cell::Float(r[k].x));
                    row.push(Cell::Float(r[k].y));
                }
                table.push(row);
            }
        }
        artifacts.push(Artifact {
            suffix: Some(DUMP_SUFFIX),
            report: Report {
                command: "trajectory".into(),
                warnings,
                config,
                table,
            },
        });
    }
    Ok(artifacts)
}
