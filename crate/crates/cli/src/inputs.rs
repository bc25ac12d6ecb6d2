//! Loads and cleans every input named by a config.

use cellres_core::geo::LocalTangentPlane;
use cellres_core::ingest::{
    build_cells, load_boundary, parse_antenna_csv, parse_population_csv, select_cells_for_region, BuildReport,
    CoordinateFrame, Network, OperatorSpectrum, PopulationGrid, RowError,
};
use serde::Serialize;

use crate::config::{Coordinates, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IngestSummary {
    pub antenna_rows: usize,
    pub antenna_row_errors: Vec<RowError>,
    pub population_row_errors: Vec<RowError>,
    pub build: BuildReport,
    pub cells_in_region: usize,
    pub cells_in_margin: usize,
}

pub struct Inputs {
    pub network: Network,
    pub grid: PopulationGrid,
    pub summary: IngestSummary,
}

fn report_rows(what: &str, errors: &[RowError]) {
    for e in errors {
        log::warn!("{what} line {}: {}", e.line, e.message);
    }
}

pub fn load_inputs(cfg: &RunConfig) -> Result<Inputs, CliError> {
    let paths = &cfg.inputs;
    let boundary = load_boundary(&paths.region)?;
    if let Some(want) = &cfg.scenario.region_id {
        if want != &boundary.id {
            return Err(CliError::Config(format!(
                "scenario region {want:?} does not match boundary {:?} in {}",
                boundary.id,
                paths.region.display()
            )));
        }
    }
    let (region, frame) = match cfg.coordinates {
        Coordinates::Planar => (boundary.planar()?, CoordinateFrame::Planar),
        Coordinates::Geographic => {
            let (origin_lat, origin_lon) = match cfg.projection_origin {
                Some(o) => (o.lat, o.lon),
                None => boundary.geographic_centroid()?,
            };
            let plane = LocalTangentPlane { origin_lat, origin_lon };
            (boundary.projected(&plane)?, CoordinateFrame::Geographic(plane))
        }
    };

    let spectrum = OperatorSpectrum::load(&paths.spectrum)?;
    let population = parse_population_csv(&paths.population)?;
    report_rows("population", &population.errors);
    let grid = PopulationGrid::new(population.cells)?;
    let antennas = parse_antenna_csv(&paths.antennas)?;
    report_rows("antennas", &antennas.errors);
    let antenna_rows = antennas.records.len() + antennas.errors.len();

    let (cells, build) = build_cells(antennas.records, &spectrum, &grid, frame)?;
    let cells = select_cells_for_region(cells, &region, cfg.model.border_margin_m)?;
    let network = Network::new(region, cells, spectrum.operators().cloned().collect())?;
    let cells_in_region = network.in_region_cells().count();
    log::info!(
        "region {}: {} cells ({} inside), {} removed as 2G, {} omnidirectional, {} unassigned",
        network.region().id(),
        network.cells().len(),
        cells_in_region,
        build.filter.removed_2g,
        build.filter.removed_omni,
        build.quarantined.len()
    );
    Ok(Inputs {
        summary: IngestSummary {
            antenna_rows,
            antenna_row_errors: antennas.errors,
            population_row_errors: population.errors,
            build,
            cells_in_region,
            cells_in_margin: network.cells().len() - cells_in_region,
        },
        network,
        grid,
    })
}
