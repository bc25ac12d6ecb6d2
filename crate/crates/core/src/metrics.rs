//! Disconnection/satisfaction metrics, single-cell importance and SINR coverage.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::association::{associate, AssociationState, Mode};
use crate::error::Error;
use crate::geo::{OperatorId, Point, Region, User};
use crate::ingest::{Cell, CellId};
use crate::model::ModelParams;
use crate::radio::{
    allocate_bandwidth, candidate_links, linear_to_db, min_bandwidth, throughput, CellLayout, LinkSeeds, LinkTable,
    Receiver,
};
use crate::seed::{self, Stream};

/// Edge length of a coverage square, m.
pub const SQUARE_M: f64 = 50.0;

/// Relative slack when comparing throughput with the rate requirement, so a user
/// whose share exactly covers its demand is not lost to rounding.
const RATE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub operator: String,
    pub users: usize,
    pub fdp: f64,
    pub fsp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub mode: Mode,
    pub run_seed: u64,
    pub users: usize,
    pub fdp: f64,
    pub fsp: f64,
    /// Per user, in user order.
    pub disconnected: Vec<bool>,
    pub satisfied: Vec<bool>,
    pub per_operator: Vec<GroupMetrics>,
}

/// Per-user airtime share and throughput; zero for unassigned users.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub share: Vec<f64>,
    pub throughput_bps: Vec<f64>,
}

fn sorted_by_id(cells: &[Cell]) -> Cow<'_, [Cell]> {
    if cells.windows(2).all(|w| w[0].id < w[1].id) {
        Cow::Borrowed(cells)
    } else {
        let mut owned = cells.to_vec();
        owned.sort_by_key(|c| c.id);
        Cow::Owned(owned)
    }
}

fn mean(flags: &[bool]) -> f64 {
    if flags.is_empty() {
        return 0.0;
    }
    flags.iter().filter(|&&f| f).count() as f64 / flags.len() as f64
}

/// Fraction of users left without a cell, plus the per-user flags.
pub fn compute_fdp(users: &[User], association: &AssociationState) -> (f64, Vec<bool>) {
    if users.is_empty() {
        log::warn!("no users: FDP reported as 0");
    }
    let flags: Vec<bool> = association.assignments.iter().map(|a| a.is_none()).collect();
    (mean(&flags), flags)
}

/// Proportional-fair airtime split inside every serving cell.
pub fn allocate(users: &[User], association: &AssociationState, cells: &[Cell]) -> Result<Allocation, Error> {
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
    for (i, a) in association.assignments.iter().enumerate() {
        if let Some(a) = a {
            members[a.cell_index].push(i);
        }
    }
    let mut share = vec![0.0; users.len()];
    let mut rate = vec![0.0; users.len()];
    for (j, served) in members.iter().enumerate() {
        if served.is_empty() {
            continue;
        }
        let w_min = served
            .iter()
            .map(|&i| {
                let sinr = association.assignments[i].expect("member is assigned").sinr;
                min_bandwidth(users[i].rate_requirement, sinr)
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (&i, xi) in served.iter().zip(allocate_bandwidth(&w_min)) {
            let sinr = association.assignments[i].expect("member is assigned").sinr;
            share[i] = xi;
            rate[i] = throughput(cells[j].bandwidth_hz, xi, sinr);
        }
    }
    Ok(Allocation {
        share,
        throughput_bps: rate,
    })
}

/// Fraction of users that are connected and receive at least their rate.
pub fn compute_fsp(users: &[User], association: &AssociationState, allocation: &Allocation) -> (f64, Vec<bool>) {
    if users.is_empty() {
        log::warn!("no users: FSP reported as 0");
    }
    let flags: Vec<bool> = users
        .iter()
        .enumerate()
        .map(|(i, u)| {
            association.assignments[i].is_some()
                && allocation.throughput_bps[i] >= u.rate_requirement * (1.0 - RATE_TOLERANCE)
        })
        .collect();
    (mean(&flags), flags)
}

fn group_metrics(
    users: &[User],
    operators: &[OperatorId],
    disconnected: &[bool],
    satisfied: &[bool],
) -> Vec<GroupMetrics> {
    let mut groups: BTreeMap<String, (usize, usize, usize)> =
        operators.iter().map(|o| (o.to_string(), (0, 0, 0))).collect();
    for (i, u) in users.iter().enumerate() {
        let g = groups.entry(u.subscription.label().to_string()).or_default();
        g.0 += 1;
        g.1 += disconnected[i] as usize;
        g.2 += satisfied[i] as usize;
    }
    groups
        .into_iter()
        .map(|(operator, (n, d, s))| {
            let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
            GroupMetrics {
                operator,
                users: n,
                fdp: frac(d),
                fsp: frac(s),
            }
        })
        .collect()
}

/// Inputs shared by every evaluation inside one run.
#[derive(Debug, Clone, Copy)]
pub struct RunContext<'a> {
    pub users: &'a [User],
    pub operators: &'a [OperatorId],
    pub model: &'a ModelParams,
    pub run_seed: u64,
}

/// Associates `ctx.users` with `cells` under each of `modes` and scores the result.
/// All modes share the same link table, LOS draws and visiting order.
pub fn evaluate(cells: &[Cell], ctx: &RunContext<'_>, modes: &[Mode]) -> Result<Vec<MetricsReport>, Error> {
    let cells = sorted_by_id(cells);
    let layout = CellLayout::new(&cells, ctx.model.radio())?;
    let receivers: Vec<Receiver> = ctx.users.iter().map(Receiver::from).collect();
    let sinr_min = ctx.model.sinr_min();
    let links = LinkTable::build(&receivers, &layout, LinkSeeds::for_run(ctx.run_seed), Some(sinr_min))?;
    let order_seed = seed::stream_seed(ctx.run_seed, Stream::AssocOrder);
    modes
        .iter()
        .map(|&mode| {
            let state = associate(ctx.users, &links, layout.cells(), mode, sinr_min, order_seed);
            let allocation = allocate(ctx.users, &state, layout.cells())?;
            let (fdp, disconnected) = compute_fdp(ctx.users, &state);
            let (fsp, satisfied) = compute_fsp(ctx.users, &state, &allocation);
            Ok(MetricsReport {
                mode,
                run_seed: ctx.run_seed,
                users: ctx.users.len(),
                fdp,
                fsp,
                per_operator: group_metrics(ctx.users, ctx.operators, &disconnected, &satisfied),
                disconnected,
                satisfied,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Importance {
    pub cell: CellId,
    pub delta_fdp: f64,
    pub delta_fsp: f64,
}

/// Change in FDP and FSP when `cell` fails, relative to `baseline` (which must have
/// been computed from `cells` with the same context). Both deltas are
/// `before - after`, so a positive `delta_fsp` means fewer satisfied users and a
/// negative `delta_fdp` means more disconnected users after the failure.
pub fn bs_importance(
    cells: &[Cell],
    ctx: &RunContext<'_>,
    baseline: &MetricsReport,
    cell: CellId,
) -> Result<Importance, Error> {
    if !cells.iter().any(|c| c.id == cell) {
        return Err(Error::UnknownCell(cell));
    }
    let remaining: Vec<Cell> = cells.iter().filter(|c| c.id != cell).cloned().collect();
    let after = evaluate(&remaining, ctx, &[baseline.mode])?.remove(0);
    Ok(Importance {
        cell,
        delta_fdp: baseline.fdp - after.fdp,
        delta_fsp: baseline.fsp - after.fsp,
    })
}

/// Which cells a coverage probe may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RasterSeries {
    Operator(OperatorId),
    Roaming,
}

impl RasterSeries {
    pub fn label(&self) -> String {
        match self {
            RasterSeries::Operator(op) => op.to_string(),
            RasterSeries::Roaming => "roaming".into(),
        }
    }

    fn admits(&self, cell: &Cell) -> bool {
        match self {
            RasterSeries::Operator(op) => &cell.operator == op,
            RasterSeries::Roaming => true,
        }
    }
}

/// Best SINR per 50 m square over the bounding box of a region, row-major from
/// the south-west corner.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRaster {
    pub label: String,
    pub origin: Point,
    pub cols: usize,
    pub rows: usize,
    pub square_m: f64,
    /// dB; `-inf` where no cell reaches the square.
    pub best_sinr_db: Vec<f64>,
    /// Whether each square's center lies inside the region.
    pub in_region: Vec<bool>,
}

impl CoverageRaster {
    pub fn center(&self, index: usize) -> Point {
        let (r, c) = (index / self.cols, index % self.cols);
        Point::new(
            self.origin.x + (c as f64 + 0.5) * self.square_m,
            self.origin.y + (r as f64 + 0.5) * self.square_m,
        )
    }

    /// Values of squares centered inside the region (all squares if none are).
    pub fn region_values(&self) -> Vec<f64> {
        let inside: Vec<f64> = self
            .best_sinr_db
            .iter()
            .zip(&self.in_region)
            .filter(|(_, &i)| i)
            .map(|(v, _)| *v)
            .collect();
        if inside.is_empty() {
            self.best_sinr_db.clone()
        } else {
            inside
        }
    }

    pub fn below_threshold_fraction(&self, threshold_db: f64) -> f64 {
        let values = self.region_values();
        if values.is_empty() {
            return 1.0;
        }
        values.iter().filter(|&&v| v < threshold_db).count() as f64 / values.len() as f64
    }

    /// Empirical CDF as `(sinr_db, cumulative fraction)` steps, ascending, one
    /// step per distinct value.
    pub fn ecdf(&self) -> Vec<(f64, f64)> {
        let mut values = self.region_values();
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let mut steps: Vec<(f64, f64)> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            let f = (i + 1) as f64 / n;
            match steps.last_mut() {
                Some(last) if last.0 == v => last.1 = f,
                _ => steps.push((v, f)),
            }
        }
        steps
    }
}

fn raster_grid(region: &Region) -> (Point, usize, usize) {
    let (min, max) = region.bounding_box();
    let cols = (((max.x - min.x) / SQUARE_M).ceil() as usize).max(1);
    let rows = (((max.y - min.y) / SQUARE_M).ceil() as usize).max(1);
    (min, cols, rows)
}

/// One raster per series. A probe sits at every square center with no load, and
/// its receiver id is the square index so LOS draws are shared across series.
pub fn coverage_rasters(
    region: &Region,
    cells: &[Cell],
    series: &[RasterSeries],
    model: &ModelParams,
    seed: u64,
) -> Result<Vec<CoverageRaster>, Error> {
    let (origin, cols, rows) = raster_grid(region);
    let cells = sorted_by_id(cells);
    let layout = CellLayout::new(&cells, model.radio())?;
    let seeds = LinkSeeds::for_coverage(seed);
    let mut template = CoverageRaster {
        label: String::new(),
        origin,
        cols,
        rows,
        square_m: SQUARE_M,
        best_sinr_db: Vec::new(),
        in_region: Vec::new(),
    };
    let per_square: Vec<Vec<f64>> = (0..cols * rows)
        .into_par_iter()
        .map(|k| {
            let rx = Receiver {
                id: k as u64,
                position: template.center(k),
            };
            let links = candidate_links(&rx, &layout, seeds)?;
            Ok(series
                .iter()
                .map(|s| {
                    links
                        .iter()
                        .filter(|l| s.admits(&layout.cells()[l.cell_index]))
                        .map(|l| l.sinr)
                        .fold(0.0, f64::max)
                })
                .map(linear_to_db)
                .collect())
        })
        .collect::<Result<_, Error>>()?;
    template.in_region = (0..cols * rows).map(|k| region.contains(&template.center(k))).collect();
    Ok(series
        .iter()
        .enumerate()
        .map(|(s, series)| CoverageRaster {
            label: series.label(),
            best_sinr_db: per_square.iter().map(|v| v[s]).collect(),
            ..template.clone()
        })
        .collect())
}

pub fn coverage_raster(
    region: &Region,
    cells: &[Cell],
    series: RasterSeries,
    model: &ModelParams,
    seed: u64,
) -> Result<CoverageRaster, Error> {
    Ok(coverage_rasters(region, cells, &[series], model, seed)?.remove(0))
}
