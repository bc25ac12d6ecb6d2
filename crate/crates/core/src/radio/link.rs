//! Link budgets: received power, co-channel interference and SINR.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::antenna::{horizontal_gain, misalignment_deg};
use super::pathloss::{self, LosState, PropagationParams};
use super::{db_to_linear, NoiseModel, RadioError};
use crate::geo::{Point, User};
use crate::ingest::{Cell, CellId};
use crate::seed;

/// Model constants shared by every link in a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    pub noise: NoiseModel,
    pub ut_height_m: f64,
    /// Interference horizon (cell to cell) and candidate radius (user to cell).
    pub r_max_m: f64,
    /// Nearest co-channel cells excluded from interference by coordination.
    pub coordination_k: usize,
    pub shadowing: bool,
}

impl Default for RadioModel {
    fn default() -> Self {
        Self {
            noise: NoiseModel::default(),
            ut_height_m: 1.5,
            r_max_m: 5000.0,
            coordination_k: 3,
            shadowing: false,
        }
    }
}

/// Seeds for the per-link random state of one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinkSeeds {
    pub los: u64,
    pub shadowing: u64,
}

impl LinkSeeds {
    pub fn for_run(run_seed: u64) -> Self {
        Self {
            los: seed::stream_seed(run_seed, seed::Stream::Los),
            shadowing: seed::stream_seed(run_seed, seed::Stream::Shadowing),
        }
    }

    /// Seeds for coverage probes, disjoint from any user stream.
    pub fn for_coverage(seed: u64) -> Self {
        let base = seed::stream_seed(seed, seed::Stream::Coverage);
        Self {
            los: seed::mix(base, &[seed::Stream::Los as u64]),
            shadowing: seed::mix(base, &[seed::Stream::Shadowing as u64]),
        }
    }
}

/// Anything that receives downlink: a sampled user or a coverage probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    pub id: u64,
    pub position: Point,
}

impl From<&User> for Receiver {
    fn from(u: &User) -> Self {
        Self {
            id: u.id,
            position: u.position,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub cell: CellId,
    /// Index of the cell in the layout it was computed against.
    pub cell_index: usize,
    pub distance_2d: f64,
    pub distance_clamped: bool,
    pub los: bool,
    pub path_loss_db: f64,
    pub gain_db: f64,
    pub rx_power_w: f64,
    pub interference_w: f64,
    pub noise_w: f64,
    pub sinr: f64,
    pub snr: f64,
}

/// A set of live cells with their interferer sets resolved.
#[derive(Debug, Clone)]
pub struct CellLayout<'a> {
    cells: &'a [Cell],
    interferers: Vec<Vec<usize>>,
    noise_w: Vec<f64>,
    model: RadioModel,
}

impl<'a> CellLayout<'a> {
    /// `cells` must be sorted by id.
    pub fn new(cells: &'a [Cell], model: RadioModel) -> Result<Self, RadioError> {
        debug_assert!(cells.windows(2).all(|w| w[0].id < w[1].id));
        let mut noise_w = Vec::with_capacity(cells.len());
        for c in cells {
            propagation_params(c, &model, LosState::Los).validate()?;
            noise_w.push(model.noise.total_noise_w(c.bandwidth_hz)?);
        }

        let mut by_channel: HashMap<u64, Vec<usize>> = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            by_channel.entry(c.frequency_mhz.to_bits()).or_default().push(i);
        }
        let interferers = cells
            .iter()
            .enumerate()
            .map(|(j, serving)| {
                let group = &by_channel[&serving.frequency_mhz.to_bits()];
                interferer_indices(cells, group, j, model.r_max_m, model.coordination_k)
            })
            .collect();

        Ok(Self {
            cells,
            interferers,
            noise_w,
            model,
        })
    }

    pub fn cells(&self) -> &'a [Cell] {
        self.cells
    }

    pub fn model(&self) -> &RadioModel {
        &self.model
    }

    pub fn index_of(&self, id: CellId) -> Option<usize> {
        self.cells.binary_search_by_key(&id, |c| c.id).ok()
    }

    /// Indices of the cells interfering with users served by cell `serving`.
    pub fn interferers_of(&self, serving: usize) -> &[usize] {
        &self.interferers[serving]
    }
}

/// Co-channel cells within `r_max` of the serving cell, minus its `k` nearest
/// co-channel neighbours. Returned in ascending index order.
fn interferer_indices(cells: &[Cell], co_channel: &[usize], serving: usize, r_max: f64, k: usize) -> Vec<usize> {
    let centre = cells[serving].position;
    let mut others: Vec<(f64, usize)> = co_channel
        .iter()
        .filter(|&&m| m != serving)
        .map(|&m| (cells[m].position.distance(&centre), m))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(cells[a.1].id.cmp(&cells[b.1].id)));
    let mut out: Vec<usize> = others
        .into_iter()
        .skip(k)
        .filter(|(d, _)| *d <= r_max)
        .map(|(_, m)| m)
        .collect();
    out.sort_unstable();
    out
}

fn propagation_params(cell: &Cell, model: &RadioModel, los: LosState) -> PropagationParams {
    PropagationParams {
        environment: cell.environment,
        bs_height_m: cell.height_m,
        ut_height_m: model.ut_height_m,
        carrier_ghz: cell.carrier_ghz(),
        los,
    }
}

struct Propagated {
    distance_2d: f64,
    clamped: bool,
    los: bool,
    path_loss_db: f64,
    gain_db: f64,
    rx_power_w: f64,
}

fn propagate(cell: &Cell, rx: &Receiver, model: &RadioModel, seeds: LinkSeeds) -> Result<Propagated, RadioError> {
    let distance_2d = cell.position.distance(&rx.position);
    let ids = [rx.id, u64::from(cell.id.0)];
    let p_los = pathloss::los_probability(cell.environment, distance_2d.max(pathloss::MIN_DISTANCE_M));
    let los = seed::keyed_uniform(seeds.los, &ids) < p_los;
    let params = propagation_params(cell, model, if los { LosState::Los } else { LosState::Nlos });
    let pl = pathloss::path_loss(&params, distance_2d)?;
    let mut path_loss_db = pl.db;
    if model.shadowing {
        let sigma = pathloss::shadow_fading_sigma_db(&params, distance_2d);
        let mut rng = ChaCha8Rng::seed_from_u64(seed::mix(seeds.shadowing, &ids));
        let z: f64 = StandardNormal.sample(&mut rng);
        path_loss_db += sigma * z;
    }
    let gain_db = if distance_2d > 0.0 {
        horizontal_gain(misalignment_deg(&cell.position, cell.azimuth_deg, &rx.position))
    } else {
        0.0
    };
    let rx_power_w = cell.tx_power_w * db_to_linear(gain_db) / db_to_linear(path_loss_db);
    Ok(Propagated {
        distance_2d,
        clamped: pl.clamped,
        los,
        path_loss_db,
        gain_db,
        rx_power_w,
    })
}

/// Received power from every cell, computed at most once per receiver.
struct PowerCache {
    values: Vec<f64>,
    touched: Vec<usize>,
}

impl PowerCache {
    fn new(n: usize) -> Self {
        Self {
            values: vec![f64::NAN; n],
            touched: Vec::new(),
        }
    }

    fn get(&mut self, layout: &CellLayout<'_>, idx: usize, rx: &Receiver, seeds: LinkSeeds) -> Result<f64, RadioError> {
        let v = self.values[idx];
        if !v.is_nan() {
            return Ok(v);
        }
        let p = propagate(&layout.cells[idx], rx, &layout.model, seeds)?.rx_power_w;
        self.values[idx] = p;
        self.touched.push(idx);
        Ok(p)
    }

    fn clear(&mut self) {
        for i in self.touched.drain(..) {
            self.values[i] = f64::NAN;
        }
    }
}

fn interference_cached(
    rx: &Receiver,
    serving: usize,
    layout: &CellLayout<'_>,
    seeds: LinkSeeds,
    cache: &mut PowerCache,
) -> Result<f64, RadioError> {
    let mut total = 0.0;
    for &m in layout.interferers_of(serving) {
        total += cache.get(layout, m, rx, seeds)?;
    }
    Ok(total)
}

fn budget(
    rx: &Receiver,
    serving: usize,
    layout: &CellLayout<'_>,
    seeds: LinkSeeds,
    cache: &mut PowerCache,
) -> Result<LinkBudget, RadioError> {
    let cell = &layout.cells[serving];
    let p = propagate(cell, rx, &layout.model, seeds)?;
    let interference_w = interference_cached(rx, serving, layout, seeds, cache)?;
    let noise_w = layout.noise_w[serving];
    Ok(LinkBudget {
        cell: cell.id,
        cell_index: serving,
        distance_2d: p.distance_2d,
        distance_clamped: p.clamped,
        los: p.los,
        path_loss_db: p.path_loss_db,
        gain_db: p.gain_db,
        rx_power_w: p.rx_power_w,
        interference_w,
        noise_w,
        sinr: p.rx_power_w / (noise_w + interference_w),
        snr: p.rx_power_w / noise_w,
    })
}

/// Interference power (W) seen by `rx` when served by the cell at `serving`.
pub fn interference(
    rx: &Receiver,
    serving: usize,
    layout: &CellLayout<'_>,
    seeds: LinkSeeds,
) -> Result<f64, RadioError> {
    if serving >= layout.cells.len() {
        return Err(RadioError::UnknownCell(serving as u32));
    }
    interference_cached(rx, serving, layout, seeds, &mut PowerCache::new(layout.cells.len()))
}

pub fn sinr(rx: &Receiver, cell: CellId, layout: &CellLayout<'_>, seeds: LinkSeeds) -> Result<LinkBudget, RadioError> {
    let idx = layout.index_of(cell).ok_or(RadioError::UnknownCell(cell.0))?;
    budget(rx, idx, layout, seeds, &mut PowerCache::new(layout.cells.len()))
}

/// Candidate links for every receiver: cells within `r_max` of the receiver,
/// optionally restricted to links meeting a minimum SINR.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkTable {
    rows: Vec<Vec<LinkBudget>>,
}

impl LinkTable {
    pub fn build(
        receivers: &[Receiver],
        layout: &CellLayout<'_>,
        seeds: LinkSeeds,
        min_sinr: Option<f64>,
    ) -> Result<Self, RadioError> {
        let n = layout.cells.len();
        let rows = receivers
            .par_iter()
            .map_init(
                || PowerCache::new(n),
                |cache, rx| {
                    let row = candidate_row(rx, layout, seeds, min_sinr, cache);
                    cache.clear();
                    row
                },
            )
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[Vec<LinkBudget>] {
        &self.rows
    }

    pub fn row(&self, receiver_index: usize) -> &[LinkBudget] {
        &self.rows[receiver_index]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

fn candidate_row(
    rx: &Receiver,
    layout: &CellLayout<'_>,
    seeds: LinkSeeds,
    min_sinr: Option<f64>,
    cache: &mut PowerCache,
) -> Result<Vec<LinkBudget>, RadioError> {
    let mut row = Vec::new();
    for (j, cell) in layout.cells.iter().enumerate() {
        if cell.position.distance(&rx.position) > layout.model.r_max_m {
            continue;
        }
        let b = budget(rx, j, layout, seeds, cache)?;
        if min_sinr.is_none_or(|t| b.sinr >= t) {
            row.push(b);
        }
    }
    Ok(row)
}

/// All candidate links of a single receiver, unfiltered.
pub fn candidate_links(
    rx: &Receiver,
    layout: &CellLayout<'_>,
    seeds: LinkSeeds,
) -> Result<Vec<LinkBudget>, RadioError> {
    candidate_row(rx, layout, seeds, None, &mut PowerCache::new(layout.cells.len()))
}
