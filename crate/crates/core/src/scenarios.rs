//! Failure injection, user surges and the Monte-Carlo driver.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::association::Mode;
use crate::error::Error;
use crate::geo::{scale_users, Point, PopulationCell, Region, SamplingPlan, User};
use crate::ingest::{Cell, CellId, Network, PopulationGrid};
use crate::metrics::{bs_importance, evaluate, MetricsReport, RunContext};
use crate::model::ModelParams;
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSelection {
    PerOperator,
    Roaming,
    #[default]
    Both,
}

impl ModeSelection {
    pub fn modes(&self) -> &'static [Mode] {
        match self {
            ModeSelection::PerOperator => &[Mode::PerOperator],
            ModeSelection::Roaming => &[Mode::Roaming],
            ModeSelection::Both => &[Mode::PerOperator, Mode::Roaming],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", untagged)]
pub enum DisasterCenter {
    #[default]
    #[serde(with = "region_centroid")]
    RegionCentroid,
    Point {
        x_m: f64,
        y_m: f64,
    },
}

mod region_centroid {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("region-centroid")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "region-centroid" {
            Ok(())
        } else {
            Err(de::Error::custom(format!("unknown disaster center {s:?}")))
        }
    }
}

impl DisasterCenter {
    pub fn resolve(&self, region: &Region) -> Point {
        match *self {
            DisasterCenter::RegionCentroid => region.centroid(),
            DisasterCenter::Point { x_m, y_m } => Point::new(x_m, y_m),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FailureModel {
    #[default]
    None,
    Isolated {
        p_iso: f64,
    },
    Correlated {
        #[serde(default)]
        center: DisasterCenter,
        r_fail_m: f64,
    },
    SingleBsSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSpec {
    pub mode: ModeSelection,
    pub failure: FailureModel,
    /// Percent increase of the active population.
    pub p_pop: f64,
    pub runs: u32,
    pub seed: u64,
    pub region_id: Option<String>,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            mode: ModeSelection::Both,
            failure: FailureModel::None,
            p_pop: 0.0,
            runs: 100,
            seed: 0,
            region_id: None,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self.failure {
            FailureModel::Isolated { p_iso } if !(0.0..=1.0).contains(&p_iso) => {
                return bad(format!("p_iso {p_iso} outside [0, 1]"));
            }
            FailureModel::Correlated { r_fail_m, center } => {
                if !(r_fail_m >= 0.0 && r_fail_m.is_finite()) {
                    return bad(format!("r_fail_m {r_fail_m} must be a finite value >= 0"));
                }
                if let DisasterCenter::Point { x_m, y_m } = center {
                    if !(x_m.is_finite() && y_m.is_finite()) {
                        return bad("disaster center must be finite".into());
                    }
                }
            }
            _ => {}
        }
        if !(self.p_pop >= 0.0 && self.p_pop.is_finite()) {
            return bad(format!("p_pop {} must be a finite value >= 0", self.p_pop));
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        Ok(())
    }
}

/// Cells that survive independent failures with probability `p_iso`. Each cell's
/// fate depends only on `seed` and its id.
pub fn apply_isolated_failures(cells: &[Cell], p_iso: f64, seed: u64) -> Result<Vec<Cell>, Error> {
    if !(0.0..=1.0).contains(&p_iso) {
        return Err(Error::InvalidParameter(format!("p_iso {p_iso} outside [0, 1]")));
    }
    Ok(cells
        .iter()
        .filter(|c| seed::keyed_uniform(seed, &[c.id.0 as u64]) >= p_iso)
        .cloned()
        .collect())
}

/// Cells farther than `r_fail_m` from `center`.
pub fn apply_correlated_failure(cells: &[Cell], center: Point, r_fail_m: f64) -> Result<Vec<Cell>, Error> {
    if r_fail_m.is_nan() || r_fail_m < 0.0 {
        return Err(Error::InvalidParameter(format!("r_fail_m {r_fail_m} must be >= 0")));
    }
    Ok(cells
        .iter()
        .filter(|c| c.position.distance(&center) > r_fail_m)
        .cloned()
        .collect())
}

/// Population cells overlapping the region's bounding box, clipped to the region.
pub fn sampling_plan(network: &Network, grid: &PopulationGrid, model: &ModelParams) -> Result<SamplingPlan, Error> {
    let cells: Vec<PopulationCell> = grid.cells_touching(network.region());
    let operators = network.operators().to_vec();
    let plan = match &model.operator_split {
        Some(split) => SamplingPlan::new(
            cells,
            model.active_fraction,
            model.rate_band_bps(),
            operators,
            split.clone(),
        )?,
        None => SamplingPlan::equal_split(cells, model.active_fraction, model.rate_band_bps(), operators)?,
    };
    Ok(plan.with_clip(network.region().clone()))
}

/// Users of run `run_seed`, including the surge.
pub fn draw_users(plan: &SamplingPlan, p_pop: f64, run_seed: u64) -> Result<Vec<User>, Error> {
    let base = plan.clone().sample(seed::stream_seed(run_seed, Stream::Users));
    let users = scale_users(&base, p_pop, seed::stream_seed(run_seed, Stream::Surge))?;
    Ok(users.users().to_vec())
}

/// Cells left after the scenario's failure model for one run.
pub fn surviving_cells(network: &Network, failure: &FailureModel, run_seed: u64) -> Result<Vec<Cell>, Error> {
    match *failure {
        FailureModel::None | FailureModel::SingleBsSweep => Ok(network.cells().to_vec()),
        FailureModel::Isolated { p_iso } => {
            apply_isolated_failures(network.cells(), p_iso, seed::stream_seed(run_seed, Stream::Failures))
        }
        FailureModel::Correlated { center, r_fail_m } => {
            apply_correlated_failure(network.cells(), center.resolve(network.region()), r_fail_m)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub run: u32,
    pub run_seed: u64,
    pub users: usize,
    pub failed_cells: Vec<CellId>,
    pub reports: Vec<MetricsReport>,
}

/// One Monte-Carlo run: users, surge, failures, then every requested mode.
pub fn simulate_run(
    spec: &ScenarioSpec,
    network: &Network,
    plan: &SamplingPlan,
    model: &ModelParams,
    run: u32,
) -> Result<RunResult, Error> {
    let run_seed = seed::run_seed(spec.seed, run as u64);
    let users = draw_users(plan, spec.p_pop, run_seed)?;
    if users.is_empty() {
        log::warn!("run {run}: no active users sampled");
    }
    let surviving = surviving_cells(network, &spec.failure, run_seed)?;
    let failed_cells = network
        .cells()
        .iter()
        .filter(|c| !surviving.iter().any(|s| s.id == c.id))
        .map(|c| c.id)
        .collect();
    let ctx = RunContext {
        users: &users,
        operators: network.operators(),
        model,
        run_seed,
    };
    Ok(RunResult {
        run,
        run_seed,
        users: users.len(),
        failed_cells,
        reports: evaluate(&surviving, &ctx, spec.mode.modes())?,
    })
}

/// Mean and sample standard deviation of one metric series across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub mode: Mode,
    /// Operator id, or `all` for the whole population.
    pub operator: String,
    pub runs: usize,
    pub fdp_mean: f64,
    pub fdp_std: f64,
    pub fsp_mean: f64,
    pub fsp_std: f64,
}

/// `(mean, sample std)`; the std of a single value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Per-run `(mode, operator, fdp, fsp)` rows in a stable order: run, mode, then
/// `all` followed by operators.
pub fn series_rows(runs: &[RunResult]) -> Vec<(u32, Mode, String, f64, f64)> {
    let mut rows = Vec::new();
    for r in runs {
        for rep in &r.reports {
            rows.push((r.run, rep.mode, "all".to_string(), rep.fdp, rep.fsp));
            for g in &rep.per_operator {
                rows.push((r.run, rep.mode, g.operator.clone(), g.fdp, g.fsp));
            }
        }
    }
    rows
}

pub fn summarize(runs: &[RunResult]) -> Vec<SeriesSummary> {
    let rows = series_rows(runs);
    let mut keys: Vec<(Mode, String)> = Vec::new();
    for (_, mode, op, _, _) in &rows {
        if !keys.iter().any(|(m, o)| m == mode && o == op) {
            keys.push((*mode, op.clone()));
        }
    }
    keys.into_iter()
        .map(|(mode, operator)| {
            let (fdp, fsp): (Vec<f64>, Vec<f64>) = rows
                .iter()
                .filter(|r| r.1 == mode && r.2 == operator)
                .map(|r| (r.3, r.4))
                .unzip();
            let (fdp_mean, fdp_std) = mean_std(&fdp);
            let (fsp_mean, fsp_std) = mean_std(&fsp);
            SeriesSummary {
                mode,
                operator,
                runs: fdp.len(),
                fdp_mean,
                fdp_std,
                fsp_mean,
                fsp_std,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRow {
    pub cell: CellId,
    pub operator: String,
    pub mode: Mode,
    /// Run-averaged `FDP before - FDP after` the cell fails.
    pub delta_fdp: f64,
    /// Run-averaged `FSP before - FSP after` the cell fails.
    pub delta_fsp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub spec: ScenarioSpec,
    pub runs: Vec<RunResult>,
    pub summary: Vec<SeriesSummary>,
    pub importance: Option<Vec<ImportanceRow>>,
}

fn check_network(network: &Network) -> Result<(), Error> {
    if network.cells().is_empty() {
        return Err(Error::EmptyNetwork);
    }
    Ok(())
}

pub fn run_scenario(
    spec: &ScenarioSpec,
    network: &Network,
    plan: &SamplingPlan,
    model: &ModelParams,
) -> Result<ScenarioResult, Error> {
    spec.validate()?;
    model.validate()?;
    check_network(network)?;
    let runs = (0..spec.runs)
        .into_par_iter()
        .map(|r| simulate_run(spec, network, plan, model, r))
        .collect::<Result<Vec<_>, _>>()?;
    let importance = match spec.failure {
        FailureModel::SingleBsSweep => Some(importance_sweep(spec, network, plan, model)?),
        _ => None,
    };
    Ok(ScenarioResult {
        spec: spec.clone(),
        summary: summarize(&runs),
        runs,
        importance,
    })
}

/// Importance of every in-region cell under each requested mode, averaged over
/// runs. Configured failures are ignored: every delta is measured
/// against the intact network. Rows are sorted by `delta_fsp` descending, then
/// mode and cell id.
pub fn importance_sweep(
    spec: &ScenarioSpec,
    network: &Network,
    plan: &SamplingPlan,
    model: &ModelParams,
) -> Result<Vec<ImportanceRow>, Error> {
    spec.validate()?;
    model.validate()?;
    check_network(network)?;
    let targets: Vec<&Cell> = network.in_region_cells().collect();
    let modes = spec.mode.modes();
    // per run: [mode][target] -> (delta_fdp, delta_fsp)
    let per_run = (0..spec.runs)
        .into_par_iter()
        .map(|run| {
            let run_seed = seed::run_seed(spec.seed, run as u64);
            let users = draw_users(plan, spec.p_pop, run_seed)?;
            let ctx = RunContext {
                users: &users,
                operators: network.operators(),
                model,
                run_seed,
            };
            let baselines = evaluate(network.cells(), &ctx, modes)?;
            baselines
                .iter()
                .map(|base| {
                    targets
                        .par_iter()
                        .map(|c| bs_importance(network.cells(), &ctx, base, c.id).map(|i| (i.delta_fdp, i.delta_fsp)))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let n = spec.runs as f64;
    let mut rows = Vec::with_capacity(modes.len() * targets.len());
    for (m, &mode) in modes.iter().enumerate() {
        for (t, cell) in targets.iter().enumerate() {
            let (sum_fdp, sum_fsp) = per_run
                .iter()
                .fold((0.0, 0.0), |(a, b), run| (a + run[m][t].0, b + run[m][t].1));
            rows.push(ImportanceRow {
                cell: cell.id,
                operator: cell.operator.to_string(),
                mode,
                delta_fdp: sum_fdp / n,
                delta_fsp: sum_fsp / n,
            });
        }
    }
    rows.sort_by(|a, b| {
        b.delta_fsp
            .total_cmp(&a.delta_fsp)
            .then(a.mode.cmp(&b.mode))
            .then(a.cell.cmp(&b.cell))
    });
    Ok(rows)
}
