//! Antenna registry CSV.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{IngestError, RowError};
use crate::geo::Point;

pub const GEOGRAPHIC_HEADER: [&str; 10] = [
    "site_id",
    "operator",
    "lat",
    "lon",
    "height_m",
    "azimuth_deg",
    "frequency_mhz",
    "bandwidth_mhz",
    "eirp_dbw",
    "technology",
];

pub const PLANAR_HEADER: [&str; 10] = [
    "site_id",
    "operator",
    "x_m",
    "y_m",
    "height_m",
    "azimuth_deg",
    "frequency_mhz",
    "bandwidth_mhz",
    "eirp_dbw",
    "technology",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Technology {
    #[serde(rename = "2G")]
    G2,
    #[serde(rename = "3G")]
    G3,
    #[serde(rename = "4G")]
    G4,
    #[serde(rename = "5G")]
    G5,
}

impl FromStr for Technology {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "2G" => Ok(Self::G2),
            "3G" => Ok(Self::G3),
            "4G" => Ok(Self::G4),
            "5G" => Ok(Self::G5),
            other => Err(format!("unknown technology {other:?}")),
        }
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::G2 => "2G",
            Self::G3 => "3G",
            Self::G4 => "4G",
            Self::G5 => "5G",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Azimuth {
    Degrees(f64),
    Omni,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Geographic { lat: f64, lon: f64 },
    Planar(Point),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAntennaRecord {
    pub site_id: String,
    pub operator_hint: Option<String>,
    pub location: Location,
    pub height_m: f64,
    pub azimuth: Azimuth,
    pub frequency_mhz: f64,
    pub bandwidth_mhz: f64,
    pub eirp_dbw: f64,
    pub technology: Technology,
}

impl RawAntennaRecord {
    pub fn is_omni(&self) -> bool {
        matches!(self.azimuth, Azimuth::Omni)
    }
}

/// Parsed records plus the rows that could not be parsed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AntennaTable {
    pub records: Vec<RawAntennaRecord>,
    pub errors: Vec<RowError>,
}

pub fn parse_antenna_csv(path: impl AsRef<Path>) -> Result<AntennaTable, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_antenna_csv(file)
}

pub fn read_antenna_csv<R: Read>(reader: R) -> Result<AntennaTable, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let planar = if header == PLANAR_HEADER {
        true
    } else if header == GEOGRAPHIC_HEADER {
        false
    } else {
        let missing: Vec<&str> = GEOGRAPHIC_HEADER
            .iter()
            .filter(|c| !header.iter().any(|h| h == *c))
            .filter(|c| planar_alternative(c).is_none_or(|alt| !header.iter().any(|h| h == alt)))
            .copied()
            .collect();
        return Err(IngestError::Schema(format!(
            "antenna header {header:?} does not match {GEOGRAPHIC_HEADER:?} or {PLANAR_HEADER:?}; missing {missing:?}"
        )));
    };

    let mut table = AntennaTable::default();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                table.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row, planar) {
            Ok(rec) => table.records.push(rec),
            Err(message) => table.errors.push(RowError { line, message }),
        }
    }
    Ok(table)
}

fn planar_alternative(col: &str) -> Option<&'static str> {
    match col {
        "lat" => Some("x_m"),
        "lon" => Some("y_m"),
        _ => None,
    }
}

fn number(row: &csv::StringRecord, idx: usize, planar: bool) -> Result<f64, String> {
    let name = if planar {
        PLANAR_HEADER[idx]
    } else {
        GEOGRAPHIC_HEADER[idx]
    };
    let raw = row.get(idx).unwrap_or("");
    let v: f64 = raw
        .parse()
        .map_err(|_| format!("column {name:?}: cannot parse {raw:?} as a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("column {name:?}: non-finite value {raw:?}"))
    }
}

fn parse_row(row: &csv::StringRecord, planar: bool) -> Result<RawAntennaRecord, String> {
    let site_id = row.get(0).unwrap_or("").to_owned();
    if site_id.is_empty() {
        return Err("empty site_id".into());
    }
    let operator_hint = Some(row.get(1).unwrap_or("").to_owned()).filter(|s| !s.is_empty());
    let (a, b) = (number(row, 2, planar)?, number(row, 3, planar)?);
    let location = if planar {
        Location::Planar(Point::new(a, b))
    } else {
        if !(-90.0..=90.0).contains(&a) || !(-180.0..=180.0).contains(&b) {
            return Err(format!("latitude/longitude ({a}, {b}) out of range"));
        }
        Location::Geographic { lat: a, lon: b }
    };
    let height_m = number(row, 4, planar)?;
    let azimuth_raw = row.get(5).unwrap_or("");
    let azimuth = if azimuth_raw.eq_ignore_ascii_case("OMNI") {
        Azimuth::Omni
    } else {
        Azimuth::Degrees(number(row, 5, planar)?.rem_euclid(360.0))
    };
    let frequency_mhz = number(row, 6, planar)?;
    let bandwidth_mhz = number(row, 7, planar)?;
    let eirp_dbw = number(row, 8, planar)?;
    let technology: Technology = row.get(9).unwrap_or("").parse()?;
    if frequency_mhz <= 0.0 {
        return Err(format!("frequency {frequency_mhz} MHz must be positive"));
    }
    if bandwidth_mhz <= 0.0 {
        return Err(format!("bandwidth {bandwidth_mhz} MHz must be positive"));
    }
    if height_m <= 0.0 {
        return Err(format!("height {height_m} m must be positive"));
    }
    Ok(RawAntennaRecord {
        site_id,
        operator_hint,
        location,
        height_m,
        azimuth,
        frequency_mhz,
        bandwidth_mhz,
        eirp_dbw,
        technology,
    })
}

/// Writes records with the header matching their location kind.
pub fn write_antenna_csv<W: Write>(records: &[RawAntennaRecord], writer: W) -> Result<(), IngestError> {
    let planar = matches!(records.first().map(|r| r.location), Some(Location::Planar(_)));
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(if planar { PLANAR_HEADER } else { GEOGRAPHIC_HEADER })?;
    for r in records {
        let (a, b) = match (r.location, planar) {
            (Location::Planar(p), true) => (p.x, p.y),
            (Location::Geographic { lat, lon }, false) => (lat, lon),
            _ => {
                return Err(IngestError::Schema(
                    "cannot write planar and geographic records to one file".into(),
                ))
            }
        };
        let azimuth = match r.azimuth {
            Azimuth::Degrees(d) => d.to_string(),
            Azimuth::Omni => "OMNI".into(),
        };
        w.write_record([
            r.site_id.clone(),
            r.operator_hint.clone().unwrap_or_default(),
            a.to_string(),
            b.to_string(),
            r.height_m.to_string(),
            azimuth,
            r.frequency_mhz.to_string(),
            r.bandwidth_mhz.to_string(),
            r.eirp_dbw.to_string(),
            r.technology.to_string(),
        ])?;
    }
    w.flush().map_err(|e| IngestError::Io {
        path: "<writer>".into(),
        source: e,
    })?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct FilterReport {
    pub removed_2g: usize,
    pub removed_omni: usize,
    pub kept: usize,
}

/// Drops 2G records and omnidirectional antennas. A 2G omni record counts as 2G.
pub fn filter_records(records: Vec<RawAntennaRecord>) -> (Vec<RawAntennaRecord>, FilterReport) {
    let mut report = FilterReport::default();
    let kept: Vec<_> = records
        .into_iter()
        .filter(|r| {
            if r.technology == Technology::G2 {
                report.removed_2g += 1;
                false
            } else if r.is_omni() {
                report.removed_omni += 1;
                false
            } else {
                true
            }
        })
        .collect();
    report.kept = kept.len();
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str =
        "site_id,operator,lat,lon,height_m,azimuth_deg,frequency_mhz,bandwidth_mhz,eirp_dbw,technology\n";

    fn parse(body: &str) -> AntennaTable {
        read_antenna_csv(format!("{HEADER}{body}").as_bytes()).unwrap()
    }

    #[test]
    fn example_row() {
        let t = parse("S1,,52.0,6.9,30,120,783,10,43,5G\n");
        assert!(t.errors.is_empty());
        let r = &t.records[0];
        assert_eq!(r.frequency_mhz, 783.0);
        assert_eq!(r.operator_hint, None);
        assert_eq!(r.location, Location::Geographic { lat: 52.0, lon: 6.9 });
        assert_eq!(r.azimuth, Azimuth::Degrees(120.0));
        assert_eq!(r.technology, Technology::G5);
    }

    #[test]
    fn omni_marker() {
        let t = parse("S1,,52.0,6.9,30,OMNI,783,10,43,5G\n");
        assert!(t.records[0].is_omni());
    }

    #[test]
    fn empty_file_with_header() {
        assert_eq!(parse(""), AntennaTable::default());
    }

    #[test]
    fn planar_header() {
        let t = read_antenna_csv(
            "site_id,operator,x_m,y_m,height_m,azimuth_deg,frequency_mhz,bandwidth_mhz,eirp_dbw,technology\nA,,10,20,30,0,783,10,43,4G\n"
                .as_bytes(),
        )
        .unwrap();
        assert_eq!(t.records[0].location, Location::Planar(Point::new(10.0, 20.0)));
    }

    #[test]
    fn missing_column_is_schema_error() {
        let err = read_antenna_csv(
            "site_id,operator,lat,lon,height_m,azimuth_deg,frequency_mhz,bandwidth_mhz,technology\n".as_bytes(),
        );
        match err {
            Err(IngestError::Schema(msg)) => assert!(msg.contains("eirp_dbw"), "{msg}"),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn bad_rows_reported_with_line_numbers() {
        let t = parse("S1,,52.0,6.9,30,120,783,10,43,5G\nS2,,52.0,6.9,abc,120,783,10,43,5G\nS3,,52.0,6.9,30,120,783,10,43,6G\nS4,,52.0,6.9,30,120,-1,10,43,4G\n");
        assert_eq!(t.records.len(), 1);
        let lines: Vec<u64> = t.errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert!(t.errors[0].message.contains("height_m"));
        assert!(t.errors[1].message.contains("technology"));
    }

    fn record(tech: Technology, azimuth: Azimuth) -> RawAntennaRecord {
        RawAntennaRecord {
            site_id: "s".into(),
            operator_hint: None,
            location: Location::Planar(Point::new(0.0, 0.0)),
            height_m: 30.0,
            azimuth,
            frequency_mhz: 783.0,
            bandwidth_mhz: 10.0,
            eirp_dbw: 40.0,
            technology: tech,
        }
    }

    #[test]
    fn filter_removes_2g_and_omni() {
        let mut recs = vec![record(Technology::G4, Azimuth::Degrees(0.0)); 7];
        recs.extend(vec![record(Technology::G2, Azimuth::Degrees(0.0)); 3]);
        let (kept, report) = filter_records(recs);
        assert_eq!(kept.len(), 7);
        assert_eq!(report.removed_2g, 3);
        assert_eq!(report.removed_omni, 0);

        let (kept, report) = filter_records(vec![
            record(Technology::G5, Azimuth::Omni),
            record(Technology::G2, Azimuth::Omni),
            record(Technology::G3, Azimuth::Degrees(10.0)),
        ]);
        assert_eq!(kept.len(), 1);
        assert_eq!((report.removed_2g, report.removed_omni, report.kept), (1, 1, 1));
    }

    #[test]
    fn filter_identity_without_2g_or_omni() {
        let recs = vec![record(Technology::G4, Azimuth::Degrees(0.0)); 4];
        assert_eq!(filter_records(recs.clone()).0, recs);
    }

    fn arb_record() -> impl Strategy<Value = RawAntennaRecord> {
        (
            "[A-Za-z0-9_]{1,8}",
            proptest::option::of("[A-Za-z]{1,5}"),
            -1e5f64..1e5,
            -1e5f64..1e5,
            1.0f64..100.0,
            prop_oneof![Just(Azimuth::Omni), (0.0f64..360.0).prop_map(Azimuth::Degrees)],
            400.0f64..6000.0,
            1.0f64..100.0,
            -10.0f64..70.0,
            prop_oneof![
                Just(Technology::G2),
                Just(Technology::G3),
                Just(Technology::G4),
                Just(Technology::G5)
            ],
        )
            .prop_map(
                |(site_id, operator_hint, x, y, height_m, azimuth, f, bw, eirp, technology)| RawAntennaRecord {
                    site_id,
                    operator_hint,
                    location: Location::Planar(Point::new(x, y)),
                    height_m,
                    azimuth,
                    frequency_mhz: f,
                    bandwidth_mhz: bw,
                    eirp_dbw: eirp,
                    technology,
                },
            )
    }

    proptest! {
        #[test]
        fn write_then_parse_round_trips(records in proptest::collection::vec(arb_record(), 1..20)) {
            let mut buf = Vec::new();
            write_antenna_csv(&records, &mut buf).unwrap();
            let parsed = read_antenna_csv(buf.as_slice()).unwrap();
            prop_assert!(parsed.errors.is_empty());
            prop_assert_eq!(parsed.records, records);
        }

        #[test]
        fn filter_is_idempotent(records in proptest::collection::vec(arb_record(), 0..30)) {
            let (once, _) = filter_records(records);
            let (twice, report) = filter_records(once.clone());
            prop_assert_eq!(&twice, &once);
            prop_assert_eq!(report.removed_2g + report.removed_omni, 0);
        }
    }
}
