//! Run configuration: a JSON document plus command-line overrides.

use std::path::{Path, PathBuf};

use cellres_core::scenarios::{DisasterCenter, FailureModel, ModeSelection, ScenarioSpec};
use cellres_core::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub antennas: PathBuf,
    pub population: PathBuf,
    pub region: PathBuf,
    pub spectrum: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coordinates {
    /// Antennas and boundary already in meters in a common plane.
    #[default]
    Planar,
    /// Antennas as lat/lon and boundary as lon/lat GeoJSON, projected locally.
    Geographic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Origin {
    pub lat: f64,
    pub lon: f64,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Relative paths are resolved against the config file's directory.
    pub inputs: InputPaths,
    #[serde(default)]
    pub coordinates: Coordinates,
    /// Projection origin for geographic inputs; defaults to the region centroid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projection_origin: Option<Origin>,
    #[serde(default)]
    pub model: ModelParams,
    #[serde(default)]
    pub scenario: ScenarioSpec,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config file and makes every relative path absolute.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let base = if base.as_os_str().is_empty() {
            Path::new(".")
        } else {
            base
        };
        let base = std::path::absolute(base).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.resolve_paths(&base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        for p in [
            &mut self.inputs.antennas,
            &mut self.inputs.population,
            &mut self.inputs.region,
            &mut self.inputs.spectrum,
            &mut self.out_dir,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.model.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.scenario.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(o) = self.projection_origin {
            if !((-90.0..=90.0).contains(&o.lat) && (-180.0..=180.0).contains(&o.lon)) {
                return Err(CliError::Config(format!("projection origin {o:?} out of range")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Flat command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub runs: Option<u32>,
    pub p_iso: Option<f64>,
    pub r_fail: Option<f64>,
    pub p_pop: Option<f64>,
    pub mode: Option<ModeSelection>,
    pub out_dir: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), CliError> {
        if self.p_iso.is_some() && self.r_fail.is_some() {
            return Err(CliError::Config(
                "--p-iso and --r-fail select different failure models".into(),
            ));
        }
        if let Some(seed) = self.seed {
            cfg.scenario.seed = seed;
        }
        if let Some(runs) = self.runs {
            cfg.scenario.runs = runs;
        }
        if let Some(p_iso) = self.p_iso {
            cfg.scenario.failure = FailureModel::Isolated { p_iso };
        }
        if let Some(r_fail_m) = self.r_fail {
            let center = match cfg.scenario.failure {
                FailureModel::Correlated { center, .. } => center,
                _ => DisasterCenter::RegionCentroid,
            };
            cfg.scenario.failure = FailureModel::Correlated { center, r_fail_m };
        }
        if let Some(p_pop) = self.p_pop {
            cfg.scenario.p_pop = p_pop;
        }
        if let Some(mode) = self.mode {
            cfg.scenario.mode = mode;
        }
        if let Some(dir) = &self.out_dir {
            cfg.out_dir = dir.clone();
        }
        Ok(())
    }
}
