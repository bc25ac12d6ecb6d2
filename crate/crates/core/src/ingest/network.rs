use serde::{Deserialize, Serialize};

use super::antenna::{filter_records, Azimuth, FilterReport, Location, RawAntennaRecord};
use super::cell::{derated_power_w, Cell, CellId};
use super::population::{classify_environment, PopulationGrid};
use super::spectrum::{assign_operator, OperatorSpectrum};
use super::IngestError;
use crate::geo::{LocalTangentPlane, OperatorId, Point, Region};

/// How registry coordinates map into the simulation plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoordinateFrame {
    /// Records carry `x_m,y_m` already in the simulation plane.
    Planar,
    /// Records carry `lat,lon`, projected around the given origin.
    Geographic(LocalTangentPlane),
}

impl CoordinateFrame {
    fn place(&self, location: &Location) -> Result<Point, String> {
        match (self, location) {
            (CoordinateFrame::Planar, Location::Planar(p)) => Ok(*p),
            (CoordinateFrame::Geographic(proj), Location::Geographic { lat, lon }) => Ok(proj.project(*lat, *lon)),
            (CoordinateFrame::Planar, Location::Geographic { .. }) => {
                Err("geographic record in a planar input set".into())
            }
            (CoordinateFrame::Geographic(_), Location::Planar(_)) => {
                Err("planar record in a geographic input set".into())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BuildReport {
    pub filter: FilterReport,
    /// `(site_id, reason)` of records dropped because no operator could be assigned.
    pub quarantined: Vec<(String, String)>,
    pub environment_fallbacks: usize,
}

/// Filters records, assigns operators and environments, and derates power.
/// Cell ids follow the order of the retained records.
pub fn build_cells(
    records: Vec<RawAntennaRecord>,
    spectrum: &OperatorSpectrum,
    grid: &PopulationGrid,
    frame: CoordinateFrame,
) -> Result<(Vec<Cell>, BuildReport), IngestError> {
    let (kept, filter) = filter_records(records);
    let mut report = BuildReport {
        filter,
        ..Default::default()
    };
    let mut cells = Vec::with_capacity(kept.len());
    for rec in kept {
        let operator = match assign_operator(&rec, spectrum) {
            Ok(op) => op,
            Err(e) => {
                log::warn!("quarantined: {e}");
                report.quarantined.push((rec.site_id.clone(), e.to_string()));
                continue;
            }
        };
        let position = frame
            .place(&rec.location)
            .map_err(|m| IngestError::Validation(format!("site {}: {m}", rec.site_id)))?;
        let class = classify_environment(&position, grid)?;
        if class.nearest_fallback {
            report.environment_fallbacks += 1;
        }
        let Azimuth::Degrees(azimuth_deg) = rec.azimuth else {
            unreachable!("omnidirectional records are filtered out");
        };
        cells.push(Cell {
            id: CellId(cells.len() as u32),
            site_id: rec.site_id,
            operator,
            technology: rec.technology,
            position,
            height_m: rec.height_m,
            azimuth_deg,
            frequency_mhz: rec.frequency_mhz,
            bandwidth_hz: rec.bandwidth_mhz * 1e6,
            tx_power_w: derated_power_w(rec.eirp_dbw),
            environment: class.environment,
            in_region: false,
            border_margin: false,
        });
    }
    Ok((cells, report))
}

/// Keeps cells inside `region` and those within `margin_m` of its boundary.
pub fn select_cells_for_region(cells: Vec<Cell>, region: &Region, margin_m: f64) -> Result<Vec<Cell>, IngestError> {
    if margin_m.is_nan() || margin_m < 0.0 {
        return Err(IngestError::Validation(format!(
            "border margin {margin_m} m must be >= 0"
        )));
    }
    Ok(cells
        .into_iter()
        .filter_map(|mut c| {
            if region.contains(&c.position) {
                c.in_region = true;
                c.border_margin = false;
                Some(c)
            } else if region.distance_to_boundary(&c.position) <= margin_m {
                c.in_region = false;
                c.border_margin = true;
                Some(c)
            } else {
                None
            }
        })
        .collect())
}

/// The simulated network of one region: its cells (sorted by id) and the set of
/// operators whose subscribers are simulated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Network {
    region: Region,
    cells: Vec<Cell>,
    operators: Vec<OperatorId>,
}

impl Network {
    pub fn new(region: Region, mut cells: Vec<Cell>, mut operators: Vec<OperatorId>) -> Result<Self, IngestError> {
        cells.sort_by_key(|c| c.id);
        if let Some(w) = cells.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(IngestError::Validation(format!("duplicate cell id {}", w[0].id)));
        }
        operators.sort();
        operators.dedup();
        if let Some(c) = cells.iter().find(|c| !operators.contains(&c.operator)) {
            return Err(IngestError::Validation(format!(
                "cell {} belongs to unknown operator {}",
                c.id, c.operator
            )));
        }
        Ok(Self {
            region,
            cells,
            operators,
        })
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn operators(&self) -> &[OperatorId] {
        &self.operators
    }

    pub fn cell(&self, id: CellId) -> Option<&Cell> {
        self.cells
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.cells[i])
    }

    pub fn in_region_cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.iter().filter(|c| c.in_region)
    }

    /// Same network with a different (sub)set of cells.
    pub fn with_cells(&self, cells: Vec<Cell>) -> Self {
        let mut cells = cells;
        cells.sort_by_key(|c| c.id);
        Self {
            region: self.region.clone(),
            cells,
            operators: self.operators.clone(),
        }
    }

    pub fn without(&self, id: CellId) -> Self {
        self.with_cells(self.cells.iter().filter(|c| c.id != id).cloned().collect())
    }
}
