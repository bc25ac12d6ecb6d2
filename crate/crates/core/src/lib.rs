//! Cellular network resilience simulation: ingestion of antenna registries and
//! population grids, TR 38.901 propagation, load-aware association, and
//! disconnection/satisfaction metrics under failures and national roaming.

pub mod association;
pub mod error;
pub mod geo;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod radio;
pub mod scenarios;
pub mod seed;

pub use association::{associate, AssociationState, Mode};
pub use error::Error;
pub use geo::{OperatorId, Point, PopulationCell, Region, Subscription, User};
pub use ingest::{Cell, CellId, Network};
pub use metrics::{CoverageRaster, MetricsReport, RasterSeries};
pub use model::ModelParams;
pub use scenarios::{FailureModel, ModeSelection, ScenarioResult, ScenarioSpec};
