//! Run configurations. Every output file embeds the [`RunConfig`] that produced it.

use std::path::PathBuf;
use std::str::FromStr;

use betti_core::complex::{MaxDim, DEFAULT_SIMPLEX_BUDGET};
use betti_core::estimator::{validate_grid, ComplexKind};
use betti_core::homology::InvariantSpec;
use betti_core::manifold::ManifoldModel;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Version tag written into every output file.
pub const FORMAT_VERSION: &str = "betti-curves/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subcommand {
    Curve,
    Oracle,
    Converge,
    Selftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format {s:?} (expected csv or json)")),
        }
    }
}

/// Scale grid: an evenly spaced range or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GridSpec {
    Range { t_min: f64, t_max: f64, steps: usize },
    List { values: Vec<f64> },
}

impl GridSpec {
    /// `t_min + (t_max - t_min) i / (steps - 1)`; a single step gives `[t_min]`.
    pub fn expand(&self) -> Result<Vec<f64>, CliError> {
        let grid = match self {
            GridSpec::Range { t_min, t_max, steps } => {
                if *steps == 0 {
                    return Err(CliError::usage("--steps must be at least 1"));
                }
                if !(t_min.is_finite() && t_max.is_finite()) {
                    return Err(CliError::usage("grid bounds must be finite"));
                }
                if *steps > 1 && !(t_max > t_min) {
                    return Err(CliError::usage(format!(
                        "--t-max ({t_max}) must exceed --t-min ({t_min}) when --steps > 1"
                    )));
                }
                if *steps == 1 {
                    vec![*t_min]
                } else {
                    let h = (t_max - t_min) / (*steps - 1) as f64;
                    let mut g: Vec<f64> = (0..*steps).map(|i| t_min + h * i as f64).collect();
                    g[*steps - 1] = *t_max;
                    g
                }
            }
            GridSpec::List { values } => values.clone(),
        };
        validate_grid(&grid).map_err(|e| CliError::usage(e.to_string()))?;
        Ok(grid)
    }
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub manifold: ManifoldModel,
    pub complex: ComplexKind,
    pub invariant: InvariantSpec,
    pub n: usize,
    /// Sample sizes of a convergence study.
    #[serde(default)]
    pub n_values: Vec<usize>,
    /// Scale of a convergence study.
    #[serde(default)]
    pub t: Option<f64>,
    /// Overrides the known invariant of the manifold in a convergence study.
    #[serde(default)]
    pub target: Option<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    /// `None` selects the smallest truncation the invariant allows.
    #[serde(default)]
    pub max_dim: Option<MaxDim>,
    pub simplex_budget: usize,
    pub workers: usize,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(subcommand: Subcommand) -> Self {
        Self {
            subcommand,
            manifold: ManifoldModel::circle(),
            complex: ComplexKind::VietorisRips,
            invariant: InvariantSpec::betti(1),
            n: 20,
            n_values: Vec::new(),
            t: None,
            target: None,
            trials: 1000,
            master_seed: 0,
            grid: None,
            max_dim: None,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
            workers: 1,
            output: None,
            format: OutputFormat::Csv,
        }
    }

    pub fn effective_max_dim(&self) -> MaxDim {
        self.max_dim.unwrap_or_else(|| self.invariant.required_max_dim())
    }

    pub fn expand_grid(&self) -> Result<Vec<f64>, CliError> {
        self.grid
            .as_ref()
            .ok_or_else(|| CliError::usage("no scale grid given (use --t-min/--t-max/--steps or --grid)"))?
            .expand()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

/// `betti<k>` or `euler`.
pub fn parse_invariant(s: &str) -> Result<InvariantSpec, String> {
    if s == "euler" {
        return Ok(InvariantSpec::euler());
    }
    s.strip_prefix("betti")
        .and_then(|k| k.parse::<usize>().ok())
        .map(InvariantSpec::betti)
        .ok_or_else(|| format!("unknown invariant {s:?} (expected betti<k> or euler)"))
}

pub fn parse_complex(s: &str) -> Result<ComplexKind, String> {
    match s {
        "vr" => Ok(ComplexKind::VietorisRips),
        "cech" => Ok(ComplexKind::Cech),
        _ => Err(format!("unknown complex {s:?} (expected vr or cech)")),
    }
}

/// A dimension or `full`.
pub fn parse_max_dim(s: &str) -> Result<MaxDim, String> {
    if s == "full" {
        return Ok(MaxDim::Full);
    }
    s.parse::<usize>()
        .map(MaxDim::Dim)
        .map_err(|_| format!("invalid max dimension {s:?} (expected an integer or full)"))
}

pub fn parse_manifold(name: &str, torus_dim: usize) -> Result<ManifoldModel, CliError> {
    match name {
        "circle" => Ok(ManifoldModel::circle()),
        "sphere" => Ok(ManifoldModel::sphere2()),
        "torus" => ManifoldModel::flat_torus(torus_dim).map_err(|e| CliError::usage(e.to_string())),
        _ => Err(CliError::usage(format!(
            "unknown manifold {name:?} (expected circle, torus or sphere)"
        ))),
    }
}

/// Pulls the embedded config out of a CSV or JSON output file.
pub fn extract_config(text: &str) -> Result<RunConfig, CliError> {
    let parsed = if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::usage(format!("not a results file: {e}")))?;
        let config = value
            .get("config")
            .cloned()
            .ok_or_else(|| CliError::usage("JSON file has no config block"))?;
        serde_json::from_value(config)
    } else {
        let line = text
            .lines()
            .find_map(|l| l.strip_prefix("# config: "))
            .ok_or_else(|| CliError::usage("file has no '# config:' line"))?;
        serde_json::from_str(line)
    };
    parsed.map_err(|e| CliError::usage(format!("embedded config is invalid: {e}")))
}
