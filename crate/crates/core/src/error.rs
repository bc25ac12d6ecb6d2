use thiserror::Error;

use crate::geo::GeoError;
use crate::ingest::{CellId, IngestError};
use crate::radio::RadioError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error("unknown cell {0}")]
    UnknownCell(CellId),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("network has no cells")]
    EmptyNetwork,
}
