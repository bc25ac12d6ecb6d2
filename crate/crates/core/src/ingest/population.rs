//! Population grid CSV and urbanity-based environment classification.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{IngestError, RowError};
use crate::geo::{Point, PopulationCell, Region, POPULATION_CELL_SIZE_M};
use crate::radio::Environment;

pub const POPULATION_HEADER: [&str; 4] = ["cell_x_m", "cell_y_m", "population", "urbanity"];

/// Urbanity 1-3 is urban macro, 4-5 rural macro.
pub fn environment_for_urbanity(urbanity: u8) -> Environment {
    if urbanity <= 3 {
        Environment::UMa
    } else {
        Environment::RMa
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationGrid {
    cells: Vec<PopulationCell>,
    index: HashMap<(i64, i64), Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub environment: Environment,
    pub urbanity: u8,
    /// The position lay outside every grid square; the nearest square was used.
    pub nearest_fallback: bool,
}

fn key(p: &Point) -> (i64, i64) {
    (
        (p.x / POPULATION_CELL_SIZE_M).floor() as i64,
        (p.y / POPULATION_CELL_SIZE_M).floor() as i64,
    )
}

impl PopulationGrid {
    pub fn new(cells: Vec<PopulationCell>) -> Result<Self, IngestError> {
        let mut index: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            c.validate()?;
            index.entry(key(&c.origin)).or_default().push(i);
        }
        Ok(Self { cells, index })
    }

    pub fn cells(&self) -> &[PopulationCell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn total_population(&self) -> f64 {
        self.cells.iter().map(|c| c.population).sum()
    }

    /// Squares whose area may overlap `region` (bounding-box test).
    pub fn cells_touching(&self, region: &Region) -> Vec<PopulationCell> {
        let (min, max) = region.bounding_box();
        self.cells
            .iter()
            .filter(|c| {
                c.origin.x <= max.x
                    && c.origin.x + c.size >= min.x
                    && c.origin.y <= max.y
                    && c.origin.y + c.size >= min.y
            })
            .copied()
            .collect()
    }

    /// The square containing `p`, lowest index first on shared edges.
    pub fn locate(&self, p: &Point) -> Option<&PopulationCell> {
        let (kx, ky) = key(p);
        let mut best: Option<usize> = None;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.index.get(&(kx + dx, ky + dy)) {
                    for &i in ids {
                        if self.cells[i].contains(p) && best.is_none_or(|b| i < b) {
                            best = Some(i);
                        }
                    }
                }
            }
        }
        best.map(|i| &self.cells[i])
    }

    pub fn nearest(&self, p: &Point) -> Option<&PopulationCell> {
        self.cells
            .iter()
            .min_by(|a, b| a.center().distance(p).total_cmp(&b.center().distance(p)))
    }
}

pub fn classify_environment(position: &Point, grid: &PopulationGrid) -> Result<Classification, IngestError> {
    if grid.is_empty() {
        return Err(IngestError::Validation("population grid is empty".into()));
    }
    let (cell, nearest_fallback) = match grid.locate(position) {
        Some(c) => (c, false),
        None => {
            let c = grid.nearest(position).expect("grid is not empty");
            log::warn!(
                "position ({:.1}, {:.1}) lies outside the population grid; using nearest square at ({:.1}, {:.1})",
                position.x,
                position.y,
                c.origin.x,
                c.origin.y
            );
            (c, true)
        }
    };
    Ok(Classification {
        environment: environment_for_urbanity(cell.urbanity),
        urbanity: cell.urbanity,
        nearest_fallback,
    })
}

/// Parsed grid squares plus the rows that could not be parsed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PopulationTable {
    pub cells: Vec<PopulationCell>,
    pub errors: Vec<RowError>,
}

pub fn parse_population_csv(path: impl AsRef<Path>) -> Result<PopulationTable, IngestError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| IngestError::io(path, e))?;
    read_population_csv(file)
}

pub fn read_population_csv<R: Read>(reader: R) -> Result<PopulationTable, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header != POPULATION_HEADER {
        return Err(IngestError::Schema(format!(
            "population header {header:?} does not match {POPULATION_HEADER:?}"
        )));
    }
    let mut table = PopulationTable::default();
    for row in rdr.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                table.errors.push(RowError {
                    line: e.position().map_or(0, |p| p.line()),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        match parse_population_row(&row) {
            Ok(c) => table.cells.push(c),
            Err(message) => table.errors.push(RowError { line, message }),
        }
    }
    Ok(table)
}

fn parse_population_row(row: &csv::StringRecord) -> Result<PopulationCell, String> {
    let field = |i: usize| -> Result<f64, String> {
        let raw = row.get(i).unwrap_or("");
        raw.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| format!("column {:?}: cannot parse {raw:?}", POPULATION_HEADER[i]))
    };
    let origin = Point::new(field(0)?, field(1)?);
    let population = field(2)?;
    let urbanity_raw = row.get(3).unwrap_or("");
    let urbanity: u8 = urbanity_raw
        .parse()
        .map_err(|_| format!("column \"urbanity\": cannot parse {urbanity_raw:?}"))?;
    let cell = PopulationCell::new(origin, population, urbanity);
    cell.validate().map_err(|e| e.to_string())?;
    Ok(cell)
}
