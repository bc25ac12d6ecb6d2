#![allow(dead_code)]

use cellres_core::geo::{OperatorId, Point, PopulationCell, Region, Subscription, User};
use cellres_core::ingest::{Cell, CellId, Network, PopulationGrid, Technology};
use cellres_core::radio::Environment;

pub fn cell(id: u32, operator: &str, x: f64, y: f64, azimuth_deg: f64, frequency_mhz: f64) -> Cell {
    Cell {
        id: CellId(id),
        site_id: format!("site{id}"),
        operator: OperatorId::new(operator),
        technology: Technology::G4,
        position: Point::new(x, y),
        height_m: 25.0,
        azimuth_deg,
        frequency_mhz,
        bandwidth_hz: 10e6,
        tx_power_w: 0.9 * 10f64.powf(3.0),
        environment: Environment::UMa,
        in_region: true,
        border_margin: false,
    }
}

pub fn user(id: u64, operator: &str, x: f64, y: f64, rate_bps: f64) -> User {
    User {
        id,
        position: Point::new(x, y),
        subscription: Subscription::Operator(OperatorId::new(operator)),
        rate_requirement: rate_bps,
    }
}

pub fn square(side: f64) -> Region {
    Region::rectangle("test", Point::new(0.0, 0.0), Point::new(side, side)).unwrap()
}

pub fn network(region: Region, cells: Vec<Cell>, operators: &[&str]) -> Network {
    Network::new(region, cells, operators.iter().map(|o| OperatorId::new(*o)).collect()).unwrap()
}

/// Uniform 500 m population grid covering `[0, side]^2`.
pub fn uniform_grid(side: f64, population: f64) -> PopulationGrid {
    let n = (side / 500.0).ceil() as usize;
    let mut cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            cells.push(PopulationCell::new(
                Point::new(i as f64 * 500.0, j as f64 * 500.0),
                population,
                2,
            ));
        }
    }
    PopulationGrid::new(cells).unwrap()
}
