//! Grids of `(z_A, z_B, rho)` configurations and the scan configuration file.
//!
//! Points use the layout `r_A = (0, 0, z_A)`, `r_B = (rho, 0, z_B)` and are
//! enumerated lexicographically in `(z_A, z_B, rho)` index order.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::atom::{AtomSpec, Polarizability};
use crate::error::{Error, Result};
use crate::geometry::PlateGeometry;
use crate::potential::{Method, QuadratureConfig};

/// Environment variable naming the directory searched for relative config paths.
pub const CONFIG_DIR_ENV: &str = "CASIMIR_PLATE_CONFIG_DIR";

/// Version stamped into every JSON document this crate reads or writes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl Axis {
    pub fn values(&self) -> Result<Vec<f64>> {
        let vals = match self {
            Axis::List(v) => v.clone(),
            Axis::Range {
                start,
                stop,
                count,
                spacing,
            } => {
                let (start, stop, n) = (*start, *stop, *count);
                if n == 0 {
                    return Ok(Vec::new());
                }
                if n == 1 {
                    return Ok(vec![start]);
                }
                let step = |i: usize| i as f64 / (n - 1) as f64;
                match spacing {
                    Spacing::Linear => (0..n).map(|i| start + (stop - start) * step(i)).collect(),
                    Spacing::Log => {
                        if !(start > 0.0 && stop > 0.0) {
                            return Err(Error::InvalidGrid(
                                "log-spaced axis needs positive endpoints".into(),
                            ));
                        }
                        let (la, lb) = (start.ln(), stop.ln());
                        (0..n).map(|i| (la + (lb - la) * step(i)).exp()).collect()
                    }
                }
            }
        };
        if let Some(bad) = vals.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("non-finite axis value {bad}")));
        }
        Ok(vals)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub z_a: f64,
    pub z_b: f64,
    pub rho: f64,
}

impl GridPoint {
    pub fn geometry(&self) -> Result<PlateGeometry> {
        PlateGeometry::from_heights(self.z_a, self.z_b, self.rho)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Grid {
    pub z_a: Vec<f64>,
    pub z_b: Vec<f64>,
    pub rho: Vec<f64>,
}

impl Grid {
    pub fn new(z_a: Vec<f64>, z_b: Vec<f64>, rho: Vec<f64>) -> Self {
        Grid { z_a, z_b, rho }
    }

    pub fn len(&self) -> usize {
        self.z_a.len() * self.z_b.len() * self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::with_capacity(self.len());
        for &z_a in &self.z_a {
            for &z_b in &self.z_b {
                for &rho in &self.rho {
                    out.push(GridPoint { z_a, z_b, rho });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

/// On-disk scan configuration (see `schemas/grid.schema.json`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScanConfig {
    pub schema_version: u32,
    pub z_a: Axis,
    pub z_b: Axis,
    pub rho: Axis,
    #[serde(default)]
    pub atom_a: Option<PathBuf>,
    #[serde(default)]
    pub atom_b: Option<PathBuf>,
    /// Static polarizability used when no atom file is given (default 1).
    #[serde(default)]
    pub alpha_a: Option<f64>,
    #[serde(default)]
    pub alpha_b: Option<f64>,
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
    #[serde(default)]
    pub quadrature: Option<QuadratureConfig>,
    #[serde(default)]
    pub k: Option<Vec<f64>>,
    #[serde(default)]
    pub output: Option<OutputSpec>,
}

/// Validated scan configuration with atom files loaded.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub source: PathBuf,
    pub grid: Grid,
    pub atom_a: Polarizability,
    pub atom_b: Polarizability,
    pub methods: Vec<Method>,
    pub quadrature: QuadratureConfig,
    pub k: Vec<f64>,
    pub output: Option<OutputSpec>,
}

/// Resolves a user-supplied config path: as given if it exists, otherwise
/// relative to `$CASIMIR_PLATE_CONFIG_DIR`.
pub fn resolve_config_path(path: &Path) -> PathBuf {
    if path.is_relative() && !path.exists() {
        if let Some(dir) = std::env::var_os(CONFIG_DIR_ENV) {
            let candidate = Path::new(&dir).join(path);
            if candidate.exists() {
                return candidate;
            }
        }
    }
    path.to_path_buf()
}

fn load_polarizability(
    file: &Option<PathBuf>,
    alpha: Option<f64>,
    base: &Path,
    which: char,
) -> Result<Polarizability> {
    match (file, alpha) {
        (Some(_), Some(_)) => Err(Error::InvalidConfig(format!(
            "atom {which}: give either an atom file or a static polarizability, not both"
        ))),
        (Some(p), None) => {
            let path = if p.is_relative() { base.join(p) } else { p.clone() };
            Ok(Polarizability::Dynamic(AtomSpec::load(&path)?))
        }
        (None, a) => {
            let a = a.unwrap_or(1.0);
            if !(a.is_finite() && a > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "atom {which}: static polarizability must be positive, got {a}"
                )));
            }
            Ok(Polarizability::Static(a))
        }
    }
}

impl ScanConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let path = resolve_config_path(path);
        let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let raw: RawScanConfig = serde_json::from_str(&text).map_err(|e| Error::json(&path, &e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_raw(raw, &path, &base)
    }

    /// Validates a parsed config; relative atom paths are taken from `base`.
    pub fn from_raw(raw: RawScanConfig, source: &Path, base: &Path) -> Result<Self> {
        if raw.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidConfig(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let grid = Grid::new(raw.z_a.values()?, raw.z_b.values()?, raw.rho.values()?);
        if grid.is_empty() {
            return Err(Error::InvalidGrid("grid has no points".into()));
        }
        let methods = raw.methods.unwrap_or_else(|| vec![Method::FarZoneClosed]);
        if methods.is_empty() {
            return Err(Error::InvalidConfig("method list is empty".into()));
        }
        let quadrature = raw.quadrature.unwrap_or_default();
        quadrature.validate()?;
        Ok(ScanConfig {
            source: source.to_path_buf(),
            grid,
            atom_a: load_polarizability(&raw.atom_a, raw.alpha_a, base, 'A')?,
            atom_b: load_polarizability(&raw.atom_b, raw.alpha_b, base, 'B')?,
            methods,
            quadrature,
            k: raw.k.unwrap_or_default(),
            output: raw.output,
        })
    }
}
