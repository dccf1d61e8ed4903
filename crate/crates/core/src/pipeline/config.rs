use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::MaterialParams;
use crate::inversion::{GridSpec, NoiseSpec, RegularizationSpec};

fn default_n_modes() -> usize {
    100
}

fn default_n_boundary() -> usize {
    128
}

fn yes() -> bool {
    true
}

/// Which artifacts a run writes into `dir`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default = "yes")]
    pub kernel_csv: bool,
    #[serde(default = "yes")]
    pub matrix_bin: bool,
    #[serde(default)]
    pub matrix_csv: bool,
    #[serde(default = "yes")]
    pub map_csv: bool,
    #[serde(default = "yes")]
    pub map_pgm: bool,
}

impl OutputSpec {
    pub fn in_dir(dir: impl Into<PathBuf>) -> Self {
        OutputSpec {
            dir: dir.into(),
            kernel_csv: true,
            matrix_bin: true,
            matrix_csv: false,
            map_csv: true,
            map_pgm: true,
        }
    }
}

/// One imaging experiment. Serialized as TOML:
///
/// ```toml
/// n_modes = 100
/// n_boundary = 128
///
/// [material]
/// mu = 2.0
/// mu_s = 0.1
/// ell2 = 0.001
/// rho = 0.7
///
/// [noise]
/// delta = 0.0
/// seed = 0
///
/// [reg]
/// alpha = 1e-16
/// filter = "spectral-cutoff"
///
/// [grid]
/// resolution = 101
/// r_max = 0.95
///
/// [outputs]
/// dir = "out"
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_n_modes")]
    pub n_modes: usize,
    #[serde(default = "default_n_boundary")]
    pub n_boundary: usize,
    pub material: MaterialParams,
    #[serde(default = "NoiseSpec::noiseless")]
    pub noise: NoiseSpec,
    pub reg: RegularizationSpec,
    #[serde(default)]
    pub grid: GridSpec,
    pub outputs: OutputSpec,
}

impl ExperimentConfig {
    /// The first numerical example with `delta = 0` and the given cut-off.
    pub fn example_one(alpha: f64, dir: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            n_modes: 100,
            n_boundary: 128,
            material: MaterialParams::example_one(),
            noise: NoiseSpec::noiseless(),
            reg: RegularizationSpec {
                alpha,
                filter: Default::default(),
            },
            grid: GridSpec::default(),
            outputs: OutputSpec::in_dir(dir),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 1 {
            return Err(Error::InvalidParameter {
                name: "n_modes",
                reason: "must be at least 1".into(),
            });
        }
        if self.n_boundary < 8 {
            return Err(Error::InvalidParameter {
                name: "n_boundary",
                reason: format!("must be at least 8, got {}", self.n_boundary),
            });
        }
        self.noise.validate()?;
        self.reg.validate()?;
        self.grid.validate()
    }

    /// Parses either a bare configuration or a run manifest, whose `[config]`
    /// table echoes the configuration it was produced from.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let cfg: ExperimentConfig = match table.get("config") {
            Some(toml::Value::Table(inner)) => inner.clone().try_into(),
            _ => table.try_into(),
        }
        .map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}
