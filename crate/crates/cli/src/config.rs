//! Run configuration: the parameter keys of [`ParamsSection`] at top level
//! plus optional `[integrator]`, `[figure]`, `[sweep]` and `[trajectory]`
//! tables. Environment variables prefixed `UNRAVEL_` override entries; `__`
//! separates a table from its key (`UNRAVEL_TRAJECTORY__N_TRAJ=500`).

use std::path::Path;

use serde::{Deserialize, Serialize};
use unravel_core::config::{ParamsSection, PARAM_KEYS};

use crate::error::{CliError, Result};

pub const ENV_PREFIX: &str = "UNRAVEL_";
const SECTION_KEYS: &[&str] = &["integrator", "figure", "sweep", "trajectory"];

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub params: ParamsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub integrator: Option<IntegratorSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<TrajectorySection>,
    /// Whether `units` was given rather than defaulted.
    #[serde(skip)]
    pub units_explicit: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_points: Option<usize>,
    /// Curve family of figure 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_fun_values: Option<Vec<f64>>,
    /// `Γ_fun/Γ_env` axis of figure 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_points: Option<usize>,
    /// Curve family of figure 3.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_csl: Option<Vec<f64>>,
    /// Explicit `Γ_fun` for each entry of `lambda_csl`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_fun_per_lambda: Option<Vec<f64>>,
    /// Figure 4 time axis (s in SI units).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_interval: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub etas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points < 2 {
            return Err(CliError::Config(format!(
                "axis `{}` needs at least 2 points",
                self.name
            )));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::Config(format!("axis `{}` has non-finite bounds", self.name)));
        }
        match self.spacing {
            Spacing::Linear => Ok(linspace(self.min, self.max, self.points)),
            Spacing::Log => {
                if self.min <= 0.0 || self.max <= 0.0 {
                    return Err(CliError::Config(format!(
                        "axis `{}`: log spacing needs positive bounds",
                        self.name
                    )));
                }
                let mut v: Vec<f64> = linspace(self.min.ln(), self.max.ln(), self.points)
                    .into_iter()
                    .map(f64::exp)
                    .collect();
                // Keep the endpoints exactly as written.
                v[0] = self.min;
                v[self.points - 1] = self.max;
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<Axis>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectorySection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_traj: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    /// Number of stored checkpoints after `t = 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoints: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feedback: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_output: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    /// How many trajectories go into the dump file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dump_trajectories: Option<usize>,
}

/// `n` evenly spaced points from `a` to `b` inclusive; endpoints are exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|i| {
            if i == n - 1 {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self> {
        if let Some(key) = table
            .keys()
            .find(|k| !PARAM_KEYS.contains(&k.as_str()) && !SECTION_KEYS.contains(&k.as_str()))
        {
            return Err(CliError::Config(format!("unknown key `{key}`")));
        }
        let units_explicit = table.contains_key("units");
        let mut cfg: RunConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.units_explicit = units_explicit;
        Ok(cfg)
    }

    /// Reads `path` (or starts from an empty document) and applies
    /// environment overrides from `vars`.
    pub fn load<I>(path: Option<&Path>, vars: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, String)>,
    {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                    path: p.display().to_string(),
                    source,
                })?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        apply_env_overrides(&mut table, vars)?;
        Self::from_table(table)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes to TOML")
    }

    pub fn figure(&self) -> FigureSection {
        self.figure.clone().unwrap_or_default()
    }
}

/// Applies `UNRAVEL_SECTION__KEY=value` overrides. Values are parsed as TOML
/// and fall back to plain strings.
pub fn apply_env_overrides<I>(table: &mut toml::Table, vars: I) -> Result<()>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut vars: Vec<(String, String)> = vars.into_iter().filter(|(k, _)| k.starts_with(ENV_PREFIX)).collect();
    vars.sort();
    for (key, raw) in vars {
        let path: Vec<String> = key[ENV_PREFIX.len()..]
            .split("__")
            .map(|s| s.to_ascii_lowercase())
            .collect();
        if path.iter().any(|s| s.is_empty()) {
            return Err(CliError::Config(format!("malformed override `{key}`")));
        }
        let value = parse_value(&raw);
        let (last, parents) = path.split_last().expect("non-empty path");
        let mut cursor = &mut *table;
        for part in parents {
            let entry = cursor
                .entry(part.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            cursor = entry
                .as_table_mut()
                .ok_or_else(|| CliError::Config(format!("override `{key}`: `{part}` is not a table")))?;
        }
        cursor.insert(last.clone(), value);
    }
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    doc.parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}
