//! Region boundaries from GeoJSON or a CSV vertex list.

use std::io::Read;
use std::path::Path;

use serde_json::Value;

use super::IngestError;
use crate::geo::{LocalTangentPlane, Point, Region};

/// Boundary ring as read from disk, before any projection.
#[derive(Debug, Clone, PartialEq)]
pub struct RawBoundary {
    pub id: String,
    /// `[x, y]` pairs; for GeoJSON in geographic mode these are `[lon, lat]`.
    pub ring: Vec<[f64; 2]>,
}

impl RawBoundary {
    pub fn planar(&self) -> Result<Region, IngestError> {
        Ok(Region::new(
            self.id.clone(),
            self.ring.iter().map(|[x, y]| Point::new(*x, *y)).collect(),
        )?)
    }

    /// Geographic centroid `(lat, lon)` of a `[lon, lat]` ring.
    pub fn geographic_centroid(&self) -> Result<(f64, f64), IngestError> {
        let c = self.planar()?.centroid();
        Ok((c.y, c.x))
    }

    pub fn projected(&self, projection: &LocalTangentPlane) -> Result<Region, IngestError> {
        Ok(Region::new(
            self.id.clone(),
            self.ring
                .iter()
                .map(|[lon, lat]| projection.project(*lat, *lon))
                .collect(),
        )?)
    }
}

/// Loads a boundary, choosing the format by extension (`.csv` or GeoJSON).
pub fn load_boundary(path: impl AsRef<Path>) -> Result<RawBoundary, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("region").to_owned();
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        read_boundary_csv(file, stem)
    } else {
        read_boundary_geojson(file, stem)
    }
}

pub fn read_boundary_csv<R: Read>(reader: R, id: String) -> Result<RawBoundary, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != ["x_m", "y_m"] {
        return Err(IngestError::Schema(format!(
            "boundary header {header:?} does not match [\"x_m\", \"y_m\"]"
        )));
    }
    let mut ring = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let coord = |i: usize| -> Result<f64, IngestError> {
            row.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| IngestError::Schema(format!("boundary line {line}: bad coordinate")))
        };
        ring.push([coord(0)?, coord(1)?]);
    }
    Ok(RawBoundary { id, ring })
}

/// Accepts a bare Polygon geometry, a Feature, or a FeatureCollection holding
/// exactly one Polygon feature. Only the outer ring is used.
pub fn read_boundary_geojson<R: Read>(reader: R, default_id: String) -> Result<RawBoundary, IngestError> {
    let doc: Value = serde_json::from_reader(reader).map_err(|e| IngestError::Schema(format!("GeoJSON: {e}")))?;
    let (geometry, id) = match doc.get("type").and_then(Value::as_str) {
        Some("Polygon") => (&doc, default_id),
        Some("Feature") => (
            doc.get("geometry").ok_or_else(|| schema("feature without geometry"))?,
            feature_name(&doc).unwrap_or(default_id),
        ),
        Some("FeatureCollection") => {
            let features = doc
                .get("features")
                .and_then(Value::as_array)
                .ok_or_else(|| schema("collection without features"))?;
            let [feature] = features.as_slice() else {
                return Err(schema(&format!("expected one feature, found {}", features.len())));
            };
            (
                feature
                    .get("geometry")
                    .ok_or_else(|| schema("feature without geometry"))?,
                feature_name(feature).unwrap_or(default_id),
            )
        }
        other => return Err(schema(&format!("unsupported GeoJSON type {other:?}"))),
    };
    if geometry.get("type").and_then(Value::as_str) != Some("Polygon") {
        return Err(schema("geometry must be a Polygon"));
    }
    let outer = geometry
        .get("coordinates")
        .and_then(Value::as_array)
        .and_then(|rings| rings.first())
        .and_then(Value::as_array)
        .ok_or_else(|| schema("polygon has no outer ring"))?;
    let ring = outer
        .iter()
        .map(|pos| {
            let pair = pos.as_array().filter(|a| a.len() >= 2);
            match pair.map(|a| (a[0].as_f64(), a[1].as_f64())) {
                Some((Some(x), Some(y))) => Ok([x, y]),
                _ => Err(schema("malformed position")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RawBoundary { id, ring })
}

fn feature_name(feature: &Value) -> Option<String> {
    let props = feature.get("properties")?;
    ["id", "name"]
        .iter()
        .find_map(|k| props.get(*k).and_then(Value::as_str))
        .map(str::to_owned)
}

fn schema(msg: &str) -> IngestError {
    IngestError::Schema(format!("GeoJSON: {msg}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geojson_polygon() {
        let doc = r#"{"type":"Polygon","coordinates":[[[0,0],[1000,0],[1000,1000],[0,1000],[0,0]]]}"#;
        let b = read_boundary_geojson(doc.as_bytes(), "r".into()).unwrap();
        let r = b.planar().unwrap();
        assert_eq!(r.boundary().len(), 4);
        assert_eq!(r.centroid(), Point::new(500.0, 500.0));
    }

    #[test]
    fn geojson_feature_name() {
        let doc = r#"{"type":"Feature","properties":{"name":"Enschede"},"geometry":{"type":"Polygon","coordinates":[[[6.8,52.2],[6.9,52.2],[6.9,52.3],[6.8,52.2]]]}}"#;
        let b = read_boundary_geojson(doc.as_bytes(), "x".into()).unwrap();
        assert_eq!(b.id, "Enschede");
        let (lat, lon) = b.geographic_centroid().unwrap();
        assert!(lat > 52.2 && lat < 52.3 && lon > 6.8 && lon < 6.9);
    }

    #[test]
    fn geojson_rejects_multipolygon() {
        let doc = r#"{"type":"MultiPolygon","coordinates":[]}"#;
        assert!(read_boundary_geojson(doc.as_bytes(), "r".into()).is_err());
    }

    #[test]
    fn csv_vertices() {
        let b = read_boundary_csv("x_m,y_m\n0,0\n10,0\n10,10\n".as_bytes(), "tri".into()).unwrap();
        assert_eq!(b.ring.len(), 3);
        assert!(read_boundary_csv("x,y\n".as_bytes(), "t".into()).is_err());
    }

    #[test]
    fn degenerate_boundary_is_reported() {
        let b = read_boundary_csv("x_m,y_m\n0,0\n10,0\n".as_bytes(), "seg".into()).unwrap();
        assert!(matches!(b.planar(), Err(IngestError::Geo(_))));
    }
}
