//! Three-sector horizontal antenna pattern.

use crate::geo::Point;

/// Horizontal half-power beamwidth of a three-sector antenna, degrees.
pub const HALF_POWER_BEAMWIDTH_DEG: f64 = 65.0;
/// Maximum side-lobe attenuation, dB.
pub const MAX_ATTENUATION_DB: f64 = 20.0;

/// Horizontal pattern gain relative to boresight, in dB (always <= 0).
///
/// The boresight gain is part of the registry EIRP, so this is the only gain applied.
pub fn horizontal_gain(phi_deg: f64) -> f64 {
    // depends on |phi| only, so the pattern is exactly symmetric
    let mut phi = phi_deg.abs();
    if phi > 180.0 {
        phi = phi.rem_euclid(360.0);
        phi = phi.min(360.0 - phi);
    }
    -(12.0 * (phi / HALF_POWER_BEAMWIDTH_DEG).powi(2)).min(MAX_ATTENUATION_DB)
}

/// Wraps an angle into `[-180, 180)`.
pub fn normalize_angle(deg: f64) -> f64 {
    (deg + 180.0).rem_euclid(360.0) - 180.0
}

/// Compass bearing (degrees clockwise from north) from `from` to `to`.
pub fn bearing_deg(from: &Point, to: &Point) -> f64 {
    (to.x - from.x).atan2(to.y - from.y).to_degrees().rem_euclid(360.0)
}

/// Angle between a sector's azimuth and the direction to `target`.
pub fn misalignment_deg(site: &Point, azimuth_deg: f64, target: &Point) -> f64 {
    normalize_angle(bearing_deg(site, target) - azimuth_deg)
}
