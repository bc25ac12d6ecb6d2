//! Registry, population and boundary ingestion plus the cleaning rules that turn
//! raw antenna rows into simulator cells.

pub mod antenna;
pub mod cell;
pub mod network;
pub mod population;
pub mod region;
pub mod spectrum;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use antenna::{
    filter_records, parse_antenna_csv, read_antenna_csv, write_antenna_csv, AntennaTable, Azimuth, FilterReport,
    Location, RawAntennaRecord, Technology,
};
pub use cell::{derated_power_w, Cell, CellId, POWER_DERATING};
pub use network::{build_cells, select_cells_for_region, BuildReport, CoordinateFrame, Network};
pub use population::{
    classify_environment, environment_for_urbanity, parse_population_csv, read_population_csv, Classification,
    PopulationGrid, PopulationTable,
};
pub use region::{load_boundary, read_boundary_csv, read_boundary_geojson, RawBoundary};
pub use spectrum::{assign_operator, Carrier, OperatorSpectrum};

use crate::geo::GeoError;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("validation error: {0}")]
    Validation(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error("site {site_id}: {frequency_mhz} MHz is not inside any operator carrier")]
    Unassigned { site_id: String, frequency_mhz: f64 },
    #[error("site {site_id}: {frequency_mhz} MHz lies on a band edge shared by several operators")]
    AmbiguousOwner { site_id: String, frequency_mhz: f64 },
    #[error("site {site_id}: operator column {hint:?} does not own {frequency_mhz} MHz")]
    OperatorMismatch {
        site_id: String,
        hint: String,
        frequency_mhz: f64,
    },
}

impl IngestError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A malformed input row; `line` is 1-based and counts the header.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}
