//! Command-line front end for `unravel-core`: steady-state reports, figure
//! data, parameter sweeps and trajectory ensembles written as CSV or JSON.

use std::path::{Path, PathBuf};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use commands::Artifact;
use config::RunConfig;
use error::Result;
use output::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Steady,
    Figure(u8),
    Sweep,
    Trajectory { seed: Option<u64> },
}

/// Runs `cmd` and returns every file it produces, primary file first.
pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<Vec<Artifact>> {
    match cmd {
        Command::Steady => commands::steady::run(cfg),
        Command::Figure(n) => commands::figure::run(n, cfg),
        Command::Sweep => commands::sweep::run(cfg),
        Command::Trajectory { seed } => commands::trajectory::run(cfg, seed),
    }
}

/// `out` for the primary file, `<stem>.<suffix>.<ext>` for auxiliary ones.
pub fn artifact_path(out: &Path, suffix: Option<&str>) -> PathBuf {
    match suffix {
        None => out.to_path_buf(),
        Some(s) => {
            let stem = out
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            let name = match out.extension() {
                Some(ext) => format!("{stem}.{s}.{}", ext.to_string_lossy()),
                None => format!("{stem}.{s}"),
            };
            out.with_file_name(name)
        }
    }
}

/// Writes the artifacts. Without `out` only the primary one goes to stdout.
pub fn write_artifacts(artifacts: &[Artifact], out: Option<&Path>, format: Format) -> Result<()> {
    for a in artifacts {
        match (out, a.suffix) {
            (Some(path), suffix) => a.report.emit(Some(&artifact_path(path, suffix)), format)?,
            (None, None) => a.report.emit(None, format)?,
            (None, Some(suffix)) => {
                eprintln!("note: `{suffix}` output needs --out; skipped");
            }
        }
    }
    Ok(())
}
