//! Operator spectrum ownership and frequency-based operator assignment.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::antenna::{RawAntennaRecord, Technology};
use super::IngestError;
use crate::geo::OperatorId;

/// A licensed carrier, `[center - bw/2, center + bw/2]` MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Carrier {
    pub center_mhz: f64,
    pub bandwidth_mhz: f64,
}

impl From<[f64; 2]> for Carrier {
    fn from([center_mhz, bandwidth_mhz]: [f64; 2]) -> Self {
        Self {
            center_mhz,
            bandwidth_mhz,
        }
    }
}

impl From<Carrier> for [f64; 2] {
    fn from(c: Carrier) -> Self {
        [c.center_mhz, c.bandwidth_mhz]
    }
}

impl Carrier {
    pub fn low(&self) -> f64 {
        self.center_mhz - self.bandwidth_mhz / 2.0
    }

    pub fn high(&self) -> f64 {
        self.center_mhz + self.bandwidth_mhz / 2.0
    }

    pub fn contains(&self, frequency_mhz: f64) -> bool {
        frequency_mhz >= self.low() && frequency_mhz <= self.high()
    }

    /// Overlap of the open intervals; carriers that merely touch do not overlap.
    pub fn overlaps(&self, other: &Carrier) -> bool {
        self.low() < other.high() && other.low() < self.high()
    }
}

/// Operator -> technology -> carriers, as loaded from the spectrum JSON.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OperatorSpectrum {
    operators: BTreeMap<OperatorId, BTreeMap<Technology, Vec<Carrier>>>,
}

impl OperatorSpectrum {
    pub fn new(operators: BTreeMap<OperatorId, BTreeMap<Technology, Vec<Carrier>>>) -> Result<Self, IngestError> {
        let s = Self { operators };
        s.validate()?;
        Ok(s)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, IngestError> {
        let s: Self =
            serde_json::from_reader(reader).map_err(|e| IngestError::Schema(format!("spectrum JSON: {e}")))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, IngestError> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
        Self::from_reader(std::io::BufReader::new(file))
    }

    pub fn operators(&self) -> impl Iterator<Item = &OperatorId> {
        self.operators.keys()
    }

    pub fn carriers(&self, operator: &OperatorId) -> impl Iterator<Item = &Carrier> {
        self.operators
            .get(operator)
            .into_iter()
            .flat_map(|techs| techs.values().flatten())
    }

    fn validate(&self) -> Result<(), IngestError> {
        let all: Vec<(&OperatorId, &Carrier)> = self
            .operators
            .iter()
            .flat_map(|(op, techs)| techs.values().flatten().map(move |c| (op, c)))
            .collect();
        for (op, c) in &all {
            if !(c.center_mhz > 0.0 && c.bandwidth_mhz > 0.0 && c.center_mhz.is_finite() && c.bandwidth_mhz.is_finite())
            {
                return Err(IngestError::Schema(format!("operator {op}: invalid carrier {c:?}")));
            }
        }
        for (i, (op_a, a)) in all.iter().enumerate() {
            for (op_b, b) in &all[i + 1..] {
                if op_a != op_b && a.overlaps(b) {
                    return Err(IngestError::Schema(format!(
                        "carriers overlap across operators: {op_a} {a:?} and {op_b} {b:?}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Operators owning a carrier that contains `frequency_mhz`. An exact center
    /// match wins over a band-edge match.
    pub fn owners(&self, frequency_mhz: f64) -> Vec<&OperatorId> {
        let exact: Vec<&OperatorId> = self
            .operators
            .keys()
            .filter(|op| self.carriers(op).any(|c| c.center_mhz == frequency_mhz))
            .collect();
        if !exact.is_empty() {
            return exact;
        }
        self.operators
            .keys()
            .filter(|op| self.carriers(op).any(|c| c.contains(frequency_mhz)))
            .collect()
    }
}

/// Maps a record to the operator owning its frequency. An explicit operator
/// column must agree with spectrum ownership.
pub fn assign_operator(record: &RawAntennaRecord, spectrum: &OperatorSpectrum) -> Result<OperatorId, IngestError> {
    let owners = spectrum.owners(record.frequency_mhz);
    let unassigned = || IngestError::Unassigned {
        site_id: record.site_id.clone(),
        frequency_mhz: record.frequency_mhz,
    };
    match &record.operator_hint {
        Some(hint) => owners
            .iter()
            .find(|op| op.as_str() == hint)
            .map(|op| (*op).clone())
            .ok_or_else(|| {
                if owners.is_empty() {
                    unassigned()
                } else {
                    IngestError::OperatorMismatch {
                        site_id: record.site_id.clone(),
                        hint: hint.clone(),
                        frequency_mhz: record.frequency_mhz,
                    }
                }
            }),
        None => match owners.as_slice() {
            [] => Err(unassigned()),
            [one] => Ok((*one).clone()),
            _ => Err(IngestError::AmbiguousOwner {
                site_id: record.site_id.clone(),
                frequency_mhz: record.frequency_mhz,
            }),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Point;
    use crate::ingest::antenna::{Azimuth, Location};

    const DUTCH: &str = include_str!("../../../../fixtures/spectrum_nl.json");

    fn record(freq: f64, hint: Option<&str>) -> RawAntennaRecord {
        RawAntennaRecord {
            site_id: "S1".into(),
            operator_hint: hint.map(str::to_owned),
            location: Location::Planar(Point::new(0.0, 0.0)),
            height_m: 30.0,
            azimuth: Azimuth::Degrees(0.0),
            frequency_mhz: freq,
            bandwidth_mhz: 10.0,
            eirp_dbw: 40.0,
            technology: Technology::G4,
        }
    }

    #[test]
    fn dutch_table_lookups() {
        let s = OperatorSpectrum::from_reader(DUTCH.as_bytes()).unwrap();
        assert_eq!(
            assign_operator(&record(783.0, None), &s).unwrap(),
            OperatorId::new("MNO2")
        );
        assert_eq!(
            assign_operator(&record(1474.5, None), &s).unwrap(),
            OperatorId::new("MNO1")
        );
        assert!(matches!(
            assign_operator(&record(10.0, None), &s),
            Err(IngestError::Unassigned { .. })
        ));
    }

    #[test]
    fn shared_band_edge_resolved_by_center() {
        let s = OperatorSpectrum::from_reader(DUTCH.as_bytes()).unwrap();
        // MNO3 1835 (20) and MNO2 1850 (10) meet at 1845 MHz.
        assert_eq!(
            assign_operator(&record(1835.0, None), &s).unwrap(),
            OperatorId::new("MNO3")
        );
        assert!(matches!(
            assign_operator(&record(1845.0, None), &s),
            Err(IngestError::AmbiguousOwner { .. })
        ));
        assert_eq!(
            assign_operator(&record(1845.0, Some("MNO2")), &s).unwrap(),
            OperatorId::new("MNO2")
        );
    }

    #[test]
    fn hint_must_agree() {
        let s = OperatorSpectrum::from_reader(DUTCH.as_bytes()).unwrap();
        assert_eq!(
            assign_operator(&record(783.0, Some("MNO2")), &s).unwrap(),
            OperatorId::new("MNO2")
        );
        assert!(matches!(
            assign_operator(&record(783.0, Some("MNO1")), &s),
            Err(IngestError::OperatorMismatch { .. })
        ));
    }

    #[test]
    fn overlapping_operators_rejected() {
        let json = r#"{"A": {"4G": [[800, 10]]}, "B": {"4G": [[805, 10]]}}"#;
        assert!(matches!(
            OperatorSpectrum::from_reader(json.as_bytes()),
            Err(IngestError::Schema(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = OperatorSpectrum::from_reader(DUTCH.as_bytes()).unwrap();
        let back: OperatorSpectrum = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        assert_eq!(s.operators().count(), 3);
    }
}
