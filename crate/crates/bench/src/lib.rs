//! Synthetic workloads for the pipeline benchmarks.

use cellres_core::geo::{OperatorId, Point, PopulationCell, Region, SamplingPlan};
use cellres_core::ingest::{Cell, CellId, Network, PopulationGrid, Technology};
use cellres_core::radio::Environment;
use cellres_core::scenarios::sampling_plan;
use cellres_core::{seed, ModelParams};

pub const OPERATORS: [&str; 3] = ["MNO1", "MNO2", "MNO3"];
const CARRIERS_MHZ: [[f64; 2]; 3] = [[800.0, 1800.0], [900.0, 2100.0], [700.0, 2600.0]];

/// A square region with three-sector sites for every operator and a uniform
/// 500 m population grid.
pub struct Workload {
    pub network: Network,
    pub grid: PopulationGrid,
    pub plan: SamplingPlan,
    pub model: ModelParams,
}

impl Workload {
    /// `side_m` wide region, one site per operator every `site_spacing_m`,
    /// positions jittered deterministically from `seed`.
    pub fn new(side_m: f64, site_spacing_m: f64, population: f64, seed: u64) -> Self {
        let region =
            Region::rectangle("bench", Point::new(0.0, 0.0), Point::new(side_m, side_m)).expect("valid square");
        let per_side = (side_m / site_spacing_m).ceil() as u64;
        let mut cells = Vec::new();
        for (o, op) in OPERATORS.iter().enumerate() {
            for i in 0..per_side {
                for j in 0..per_side {
                    let site = (o as u64 * per_side + i) * per_side + j;
                    let jitter = |axis: u64| (seed::keyed_uniform(seed, &[site, axis]) - 0.5) * site_spacing_m;
                    let position = Point::new(
                        (i as f64 + 0.5) * site_spacing_m + jitter(0),
                        (j as f64 + 0.5) * site_spacing_m + jitter(1),
                    );
                    for sector in 0..3 {
                        let carrier = CARRIERS_MHZ[o][(site as usize + sector) % 2];
                        cells.push(sector_cell(
                            cells.len() as u32,
                            op,
                            position,
                            120.0 * sector as f64,
                            carrier,
                        ));
                    }
                }
            }
        }
        let mut population_cells = Vec::new();
        let n = (side_m / 500.0).ceil() as usize;
        for i in 0..n {
            for j in 0..n {
                population_cells.push(PopulationCell::new(
                    Point::new(i as f64 * 500.0, j as f64 * 500.0),
                    population,
                    2,
                ));
            }
        }
        let grid = PopulationGrid::new(population_cells).expect("valid grid");
        let operators = OPERATORS.iter().map(|o| OperatorId::new(*o)).collect();
        let network = Network::new(region, cells, operators).expect("valid network");
        let model = ModelParams::default();
        let plan = sampling_plan(&network, &grid, &model).expect("valid plan");
        Self {
            network,
            grid,
            plan,
            model,
        }
    }
}

fn sector_cell(id: u32, operator: &str, position: Point, azimuth_deg: f64, frequency_mhz: f64) -> Cell {
    Cell {
        id: CellId(id),
        site_id: format!("{operator}-{}", id / 3),
        operator: OperatorId::new(operator),
        technology: Technology::G4,
        position,
        height_m: 30.0,
        azimuth_deg,
        frequency_mhz,
        bandwidth_hz: 10e6,
        tx_power_w: 0.9 * 1000.0,
        environment: Environment::UMa,
        in_region: true,
        border_margin: false,
    }
}
