//! Simulation-wide model constants.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::radio::{db_to_linear, NoiseModel, RadioModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Minimum SINR for a usable link, dB.
    pub gamma_min_db: f64,
    /// Fraction of residents active at once.
    pub active_fraction: f64,
    /// Interference horizon and association radius, m.
    pub r_max_m: f64,
    pub rate_min_mbps: f64,
    pub rate_max_mbps: f64,
    pub thermal_noise_dbm_per_hz: f64,
    pub noise_figure_db: f64,
    pub border_margin_m: f64,
    pub coordination_k: usize,
    pub shadowing: bool,
    pub ut_height_m: f64,
    /// Per-operator share of users, in sorted operator order. `None` splits equally.
    pub operator_split: Option<Vec<f64>>,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            gamma_min_db: 5.0,
            active_fraction: 0.02,
            r_max_m: 5000.0,
            rate_min_mbps: 8.0,
            rate_max_mbps: 20.0,
            thermal_noise_dbm_per_hz: -174.0,
            noise_figure_db: 7.8,
            border_margin_m: 2000.0,
            coordination_k: 3,
            shadowing: false,
            ut_height_m: 1.5,
            operator_split: None,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !self.gamma_min_db.is_finite() {
            return bad(format!("gamma_min_db {} must be finite", self.gamma_min_db));
        }
        if !(0.0..=1.0).contains(&self.active_fraction) {
            return bad(format!("active_fraction {} outside [0, 1]", self.active_fraction));
        }
        if !(self.r_max_m > 0.0 && self.r_max_m.is_finite()) {
            return bad(format!("r_max_m {} must be positive", self.r_max_m));
        }
        if !(self.rate_min_mbps >= 0.0 && self.rate_min_mbps <= self.rate_max_mbps && self.rate_max_mbps.is_finite()) {
            return bad(format!(
                "rate band [{}, {}] Mbps is not ordered",
                self.rate_min_mbps, self.rate_max_mbps
            ));
        }
        if self.border_margin_m.is_nan() || self.border_margin_m < 0.0 {
            return bad(format!("border_margin_m {} must be >= 0", self.border_margin_m));
        }
        if !(1.0..=10.0).contains(&self.ut_height_m) {
            return bad(format!("ut_height_m {} outside [1, 10]", self.ut_height_m));
        }
        if !(self.thermal_noise_dbm_per_hz.is_finite() && self.noise_figure_db.is_finite()) {
            return bad("noise parameters must be finite".into());
        }
        Ok(())
    }

    pub fn radio(&self) -> RadioModel {
        RadioModel {
            noise: NoiseModel {
                thermal_dbm_per_hz: self.thermal_noise_dbm_per_hz,
                noise_figure_db: self.noise_figure_db,
            },
            ut_height_m: self.ut_height_m,
            r_max_m: self.r_max_m,
            coordination_k: self.coordination_k,
            shadowing: self.shadowing,
        }
    }

    /// Threshold SINR as a linear ratio.
    pub fn sinr_min(&self) -> f64 {
        db_to_linear(self.gamma_min_db)
    }

    pub fn rate_band_bps(&self) -> (f64, f64) {
        (self.rate_min_mbps * 1e6, self.rate_max_mbps * 1e6)
    }
}
