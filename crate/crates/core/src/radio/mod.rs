//! Propagation, antenna gain, noise, interference, SINR and capacity.
//!
//! All power arithmetic is linear (watts); dB appears only at the edges.

pub mod antenna;
pub mod capacity;
pub mod link;
pub mod pathloss;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use antenna::{horizontal_gain, misalignment_deg};
pub use capacity::{allocate_bandwidth, min_bandwidth, throughput};
pub use link::{
    candidate_links, interference, sinr, CellLayout, LinkBudget, LinkSeeds, LinkTable, RadioModel, Receiver,
};
pub use pathloss::{los_probability, path_loss, Environment, LosState, PathLoss, PropagationParams};

#[derive(Debug, Error, PartialEq)]
pub enum RadioError {
    #[error("carrier {0} GHz outside the 0.5-100 GHz model range")]
    CarrierOutOfRange(f64),
    #[error("{0} height {1} m is outside the model range")]
    InvalidHeight(&'static str, f64),
    #[error("invalid distance {0} m")]
    InvalidDistance(f64),
    #[error("LOS state must be resolved before computing path loss")]
    UnresolvedLos,
    #[error("total noise must be positive, got {0} W")]
    NonPositiveNoise(f64),
    #[error("SINR must be positive to size bandwidth, got {0}")]
    NonPositiveSinr(f64),
    #[error("cell {0} is not part of the layout")]
    UnknownCell(u32),
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Receiver noise: thermal density integrated over the band plus noise figure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub thermal_dbm_per_hz: f64,
    pub noise_figure_db: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            thermal_dbm_per_hz: -174.0,
            noise_figure_db: 7.8,
        }
    }
}

impl NoiseModel {
    /// Total noise power in watts over `bandwidth_hz`.
    pub fn total_noise_w(&self, bandwidth_hz: f64) -> Result<f64, RadioError> {
        let n = db_to_linear(self.thermal_dbm_per_hz - 30.0) * bandwidth_hz * db_to_linear(self.noise_figure_db);
        if n > 0.0 && n.is_finite() {
            Ok(n)
        } else {
            Err(RadioError::NonPositiveNoise(n))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_over_ten_mhz() {
        let n = NoiseModel::default().total_noise_w(10e6).unwrap();
        // -174 + 70 + 7.8 = -96.2 dBm
        assert!((linear_to_db(n) + 30.0 + 96.2).abs() < 1e-9);
    }

    #[test]
    fn zero_bandwidth_noise_rejected() {
        assert!(NoiseModel::default().total_noise_w(0.0).is_err());
        assert!(NoiseModel::default().total_noise_w(-1.0).is_err());
    }

    #[test]
    fn db_round_trip() {
        assert!((linear_to_db(db_to_linear(5.0)) - 5.0).abs() < 1e-12);
    }
}
