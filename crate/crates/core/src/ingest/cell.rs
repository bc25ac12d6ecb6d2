use std::fmt;

use serde::{Deserialize, Serialize};

use super::antenna::Technology;
use crate::geo::{OperatorId, Point};
use crate::radio::Environment;

/// Fraction of the registered maximum EIRP a cell actually radiates.
pub const POWER_DERATING: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CellId(pub u32);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One transmitting sector-carrier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: CellId,
    pub site_id: String,
    pub operator: OperatorId,
    pub technology: Technology,
    pub position: Point,
    pub height_m: f64,
    /// Boresight, degrees clockwise from north.
    pub azimuth_deg: f64,
    pub frequency_mhz: f64,
    pub bandwidth_hz: f64,
    /// Radiated power in watts, boresight antenna gain included.
    pub tx_power_w: f64,
    pub environment: Environment,
    pub in_region: bool,
    pub border_margin: bool,
}

impl Cell {
    pub fn carrier_ghz(&self) -> f64 {
        self.frequency_mhz / 1000.0
    }

    pub fn is_co_channel(&self, other: &Cell) -> bool {
        self.frequency_mhz == other.frequency_mhz
    }
}

/// Linear transmit power for a registered EIRP in dBW.
pub fn derated_power_w(eirp_dbw: f64) -> f64 {
    POWER_DERATING * 10f64.powf(eirp_dbw / 10.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn derating_is_ninety_percent(eirp in -30.0f64..70.0) {
            let raw = 10f64.powf(eirp / 10.0);
            let p = derated_power_w(eirp);
            prop_assert!((p / raw - 0.9).abs() <= 1e-12 * 0.9);
        }
    }
}
