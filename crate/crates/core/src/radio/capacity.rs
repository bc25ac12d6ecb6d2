//! Time-shared bandwidth and Shannon throughput.

use super::RadioError;

/// Bandwidth a user needs at SINR `sinr` (linear) to reach `rate_bps`.
pub fn min_bandwidth(rate_bps: f64, sinr: f64) -> Result<f64, RadioError> {
    if sinr.is_nan() || sinr <= 0.0 {
        return Err(RadioError::NonPositiveSinr(sinr));
    }
    Ok(rate_bps / (1.0 + sinr).log2())
}

/// Splits a cell's airtime in proportion to each user's minimum bandwidth.
///
/// Returns an empty vector for an empty user set.
pub fn allocate_bandwidth(min_bandwidths: &[f64]) -> Vec<f64> {
    let total: f64 = min_bandwidths.iter().sum();
    if total > 0.0 {
        min_bandwidths.iter().map(|w| w / total).collect()
    } else {
        // every user asks for nothing: share equally
        let n = min_bandwidths.len() as f64;
        vec![1.0 / n; min_bandwidths.len()]
    }
}

/// Achievable rate of a user holding share `xi` of a cell with `bandwidth_hz`.
pub fn throughput(bandwidth_hz: f64, xi: f64, sinr: f64) -> f64 {
    xi * bandwidth_hz * (1.0 + sinr).log2()
}
