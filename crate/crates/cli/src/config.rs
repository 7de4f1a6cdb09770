//! Run configuration: defaults, optional JSON file, command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use dimdrop_core::algebra::BaseAlgebra;
use dimdrop_core::{Resolution, Tolerances};
use serde::{Deserialize, Serialize};

/// Default output directory when `--out` is not given.
pub const OUT_DIR_ENV: &str = "DIMDROP_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tol: f64,
    pub boundary_tol: f64,
    #[serde(rename = "T")]
    pub grid_t: usize,
    #[serde(rename = "G")]
    pub grid_g: usize,
    /// Slices per homotopy stage.
    pub grid_s: usize,
    /// Largest admissible jump between adjacent samples of a certificate.
    pub step_budget: f64,
    pub seed: u64,
    /// Where the report goes; not part of the serialized report.
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let tol = Tolerances::default();
        let res = Resolution::default();
        RunConfig {
            tol: tol.tol,
            boundary_tol: tol.boundary_tol,
            grid_t: res.grid_t,
            grid_g: 256,
            grid_s: res.grid_s,
            step_budget: res.step_budget,
            seed: 0,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.grid_t == 0 || !self.grid_t.is_multiple_of(2) {
            return bad(format!("T must be positive and even (got {})", self.grid_t));
        }
        if self.grid_g < 8 {
            return bad(format!("G must be at least 8 (got {})", self.grid_g));
        }
        if self.grid_s == 0 {
            return bad("grid-s must be positive".into());
        }
        for (name, v) in [("tol", self.tol), ("boundary_tol", self.boundary_tol), ("step_budget", self.step_budget)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be a positive number (got {v})"));
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            tol: self.tol,
            boundary_tol: self.boundary_tol,
            glue_tol: self.boundary_tol,
            ..Tolerances::default()
        }
    }

    pub fn resolution(&self) -> Resolution {
        Resolution { grid_t: self.grid_t, grid_s: self.grid_s, step_budget: self.step_budget }
    }

    /// Explicit `--out`, else `$DIMDROP_OUT_DIR/<command>.<ext>`, else stdout.
    pub fn output_path(&self, command: &str, extension: &str) -> Option<PathBuf> {
        if let Some(p) = &self.out {
            return Some(p.clone());
        }
        std::env::var_os(OUT_DIR_ENV)
            .filter(|d| !d.is_empty())
            .map(|d| PathBuf::from(d).join(format!("{command}.{extension}")))
    }
}

/// Base algebra as written on the command line: `scalars`, `matrices:N`
/// or `circle:N`. The circle resolution comes from the run config.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseArg {
    Scalars,
    Matrices(usize),
    Circle(usize),
}

impl BaseArg {
    pub fn resolve(self, grid_g: usize) -> BaseAlgebra {
        match self {
            BaseArg::Scalars => BaseAlgebra::Scalars,
            BaseArg::Matrices(n) => BaseAlgebra::Matrices(n),
            BaseArg::Circle(n) => BaseAlgebra::CircleLoops(n, grid_g),
        }
    }
}

impl FromStr for BaseArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, size) = match s.split_once(':') {
            Some((k, n)) => (k, Some(n.parse::<usize>().map_err(|e| format!("bad fibre size in {s:?}: {e}"))?)),
            None => (s, None),
        };
        let size = size.unwrap_or(1);
        if size == 0 {
            return Err("fibre size must be positive".into());
        }
        match kind {
            "scalars" if size == 1 => Ok(BaseArg::Scalars),
            "matrices" => Ok(BaseArg::Matrices(size)),
            "circle" => Ok(BaseArg::Circle(size)),
            _ => Err(format!("unknown base {s:?} (expected scalars, matrices:N or circle:N)")),
        }
    }
}

impl fmt::Display for BaseArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseArg::Scalars => f.write_str("scalars"),
            BaseArg::Matrices(n) => write!(f, "matrices:{n}"),
            BaseArg::Circle(n) => write!(f, "circle:{n}"),
        }
    }
}
