//! 3GPP TR 38.901 rural (RMa) and urban (UMa) macro path loss and LOS probability.
//!
//! Distances follow the standard's own usage: breakpoint comparisons and LOS
//! probability take the 2D distance, the loss formulas take the 3D distance.

use serde::{Deserialize, Serialize};

use super::RadioError;

const SPEED_OF_LIGHT: f64 = 3.0e8;
/// Minimum 2D distance covered by the models.
pub const MIN_DISTANCE_M: f64 = 10.0;
/// RMa average building height.
const RMA_BUILDING_HEIGHT_M: f64 = 5.0;
/// RMa average street width.
const RMA_STREET_WIDTH_M: f64 = 20.0;
/// UMa effective environment height for UT heights below 13 m.
const UMA_ENV_HEIGHT_M: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Environment {
    #[serde(rename = "UMa")]
    UMa,
    #[serde(rename = "RMa")]
    RMa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LosState {
    Los,
    Nlos,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationParams {
    pub environment: Environment,
    pub bs_height_m: f64,
    pub ut_height_m: f64,
    pub carrier_ghz: f64,
    pub los: LosState,
}

impl PropagationParams {
    pub fn validate(&self) -> Result<(), RadioError> {
        if !(0.5..=100.0).contains(&self.carrier_ghz) {
            return Err(RadioError::CarrierOutOfRange(self.carrier_ghz));
        }
        if !(self.bs_height_m > 0.0 && self.bs_height_m.is_finite()) {
            return Err(RadioError::InvalidHeight("BS", self.bs_height_m));
        }
        if !(1.0..=10.0).contains(&self.ut_height_m) {
            return Err(RadioError::InvalidHeight("UT", self.ut_height_m));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLoss {
    pub db: f64,
    /// The 2D distance was below [`MIN_DISTANCE_M`] and was clamped.
    pub clamped: bool,
}

pub fn los_probability(environment: Environment, distance_2d: f64) -> f64 {
    let d = distance_2d.max(0.0);
    match environment {
        Environment::RMa => {
            if d <= 10.0 {
                1.0
            } else {
                (-(d - 10.0) / 1000.0).exp()
            }
        }
        Environment::UMa => {
            if d <= 18.0 {
                1.0
            } else {
                18.0 / d + (-d / 63.0).exp() * (1.0 - 18.0 / d)
            }
        }
    }
}

pub fn path_loss(params: &PropagationParams, distance_2d: f64) -> Result<PathLoss, RadioError> {
    params.validate()?;
    if !(distance_2d >= 0.0 && distance_2d.is_finite()) {
        return Err(RadioError::InvalidDistance(distance_2d));
    }
    let clamped = distance_2d < MIN_DISTANCE_M;
    let d2 = distance_2d.max(MIN_DISTANCE_M);
    let los = match params.los {
        LosState::Los => true,
        LosState::Nlos => false,
        LosState::Unresolved => return Err(RadioError::UnresolvedLos),
    };
    let db = match params.environment {
        Environment::UMa => uma(params, d2, los),
        Environment::RMa => rma(params, d2, los),
    };
    Ok(PathLoss { db, clamped })
}

/// Standard deviation of log-normal shadow fading for the given link state.
pub fn shadow_fading_sigma_db(params: &PropagationParams, distance_2d: f64) -> f64 {
    let los = params.los == LosState::Los;
    match (params.environment, los) {
        (Environment::UMa, true) => 4.0,
        (Environment::UMa, false) => 6.0,
        (Environment::RMa, true) => {
            if distance_2d.max(MIN_DISTANCE_M) <= rma_breakpoint(params) {
                4.0
            } else {
                6.0
            }
        }
        (Environment::RMa, false) => 8.0,
    }
}

fn distance_3d(params: &PropagationParams, d2: f64) -> f64 {
    d2.hypot(params.bs_height_m - params.ut_height_m)
}

fn uma(p: &PropagationParams, d2: f64, los: bool) -> f64 {
    let d3 = distance_3d(p, d2);
    let fc = p.carrier_ghz;
    let h_bs = p.bs_height_m - UMA_ENV_HEIGHT_M;
    let h_ut = p.ut_height_m - UMA_ENV_HEIGHT_M;
    let breakpoint = 4.0 * h_bs * h_ut * fc * 1e9 / SPEED_OF_LIGHT;
    let los_db = if d2 <= breakpoint {
        28.0 + 22.0 * d3.log10() + 20.0 * fc.log10()
    } else {
        28.0 + 40.0 * d3.log10() + 20.0 * fc.log10()
            - 9.0 * (breakpoint.powi(2) + (p.bs_height_m - p.ut_height_m).powi(2)).log10()
    };
    if los {
        return los_db;
    }
    let nlos_db = 13.54 + 39.08 * d3.log10() + 20.0 * fc.log10() - 0.6 * (p.ut_height_m - 1.5);
    los_db.max(nlos_db)
}

fn rma_breakpoint(p: &PropagationParams) -> f64 {
    2.0 * std::f64::consts::PI * p.bs_height_m * p.ut_height_m * p.carrier_ghz * 1e9 / SPEED_OF_LIGHT
}

fn rma_pl1(fc: f64, d3: f64) -> f64 {
    let h = RMA_BUILDING_HEIGHT_M;
    20.0 * (40.0 * std::f64::consts::PI * d3 * fc / 3.0).log10() + (0.03 * h.powf(1.72)).min(10.0) * d3.log10()
        - (0.044 * h.powf(1.72)).min(14.77)
        + 0.002 * h.log10() * d3
}

fn rma(p: &PropagationParams, d2: f64, los: bool) -> f64 {
    let d3 = distance_3d(p, d2);
    let fc = p.carrier_ghz;
    let breakpoint = rma_breakpoint(p);
    let los_db = if d2 <= breakpoint {
        rma_pl1(fc, d3)
    } else {
        rma_pl1(fc, breakpoint) + 40.0 * (d3 / breakpoint).log10()
    };
    if los {
        return los_db;
    }
    let (h, w, h_bs, h_ut) = (RMA_BUILDING_HEIGHT_M, RMA_STREET_WIDTH_M, p.bs_height_m, p.ut_height_m);
    let nlos_db = 161.04 - 7.1 * w.log10() + 7.5 * h.log10() - (24.37 - 3.7 * (h / h_bs).powi(2)) * h_bs.log10()
        + (43.42 - 3.1 * h_bs.log10()) * (d3.log10() - 3.0)
        + 20.0 * fc.log10()
        - (3.2 * (11.75 * h_ut).log10().powi(2) - 4.97);
    los_db.max(nlos_db)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(environment: Environment, bs: f64, los: LosState) -> PropagationParams {
        PropagationParams {
            environment,
            bs_height_m: bs,
            ut_height_m: 1.5,
            carrier_ghz: 2.0,
            los,
        }
    }

    #[test]
    fn los_probability_limits() {
        assert_eq!(los_probability(Environment::RMa, 5.0), 1.0);
        assert_eq!(los_probability(Environment::UMa, 18.0), 1.0);
        assert!((los_probability(Environment::RMa, 1010.0) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn carrier_out_of_range() {
        let mut p = params(Environment::UMa, 25.0, LosState::Los);
        p.carrier_ghz = 0.01;
        assert!(matches!(path_loss(&p, 100.0), Err(RadioError::CarrierOutOfRange(_))));
    }

    #[test]
    fn unresolved_los_is_an_error() {
        let p = params(Environment::UMa, 25.0, LosState::Unresolved);
        assert!(matches!(path_loss(&p, 100.0), Err(RadioError::UnresolvedLos)));
    }

    #[test]
    fn short_distances_clamp() {
        let p = params(Environment::UMa, 25.0, LosState::Los);
        let near = path_loss(&p, 3.0).unwrap();
        let ten = path_loss(&p, 10.0).unwrap();
        assert!(near.clamped && !ten.clamped);
        assert_eq!(near.db, ten.db);
    }

    #[test]
    fn uma_los_at_100m_matches_closed_form() {
        // 28 + 22 log10(d3) + 20 log10(2), d3 = sqrt(100^2 + 23.5^2)
        let p = params(Environment::UMa, 25.0, LosState::Los);
        let expected = 78.277_395_703_126_49;
        assert!((path_loss(&p, 100.0).unwrap().db - expected).abs() < 1e-6);
        assert!(path_loss(&p, 200.0).unwrap().db > path_loss(&p, 100.0).unwrap().db);
    }

    #[test]
    fn uma_los_continuous_at_breakpoint() {
        let p = params(Environment::UMa, 25.0, LosState::Los);
        let bp = 4.0 * 24.0 * 0.5 * 2e9 / 3e8;
        let below = path_loss(&p, bp).unwrap().db;
        let above = path_loss(&p, bp * (1.0 + 1e-12)).unwrap().db;
        assert!((above - below).abs() < 1e-8);
    }

    proptest! {
        #[test]
        fn monotone_in_distance(
            d in 10.0f64..10_000.0,
            step in 0.0f64..2_000.0,
            bs in 10.0f64..60.0,
            fc in 0.5f64..6.0,
            rural in any::<bool>(),
            los in any::<bool>(),
        ) {
            let p = PropagationParams {
                environment: if rural { Environment::RMa } else { Environment::UMa },
                bs_height_m: bs,
                ut_height_m: 1.5,
                carrier_ghz: fc,
                los: if los { LosState::Los } else { LosState::Nlos },
            };
            let a = path_loss(&p, d).unwrap().db;
            let b = path_loss(&p, d + step).unwrap().db;
            prop_assert!(b >= a - 1e-9, "{a} > {b}");
        }

        #[test]
        fn nlos_never_below_los(d in 10.0f64..10_000.0, bs in 10.0f64..60.0, rural in any::<bool>()) {
            let env = if rural { Environment::RMa } else { Environment::UMa };
            let l = path_loss(&params(env, bs, LosState::Los), d).unwrap().db;
            let n = path_loss(&params(env, bs, LosState::Nlos), d).unwrap().db;
            prop_assert!(n >= l);
        }

        #[test]
        fn los_probability_in_unit_interval(d in 0.0f64..50_000.0, rural in any::<bool>()) {
            let env = if rural { Environment::RMa } else { Environment::UMa };
            let p = los_probability(env, d);
            prop_assert!((0.0..=1.0).contains(&p));
        }
    }
}
