//! The `run`, `importance` and `coverage` commands.

use std::path::{Path, PathBuf};

use cellres_core::association::Mode;
use cellres_core::metrics::{coverage_rasters, CoverageRaster, GroupMetrics, RasterSeries};
use cellres_core::scenarios::{
    importance_sweep, run_scenario, sampling_plan, surviving_cells, FailureModel, ImportanceRow, ModeSelection,
    ScenarioSpec, SeriesSummary,
};
use cellres_core::{seed, CellId, ModelParams};
use serde::Serialize;

use crate::config::{Overrides, RunConfig};
use crate::error::CliError;
use crate::inputs::{load_inputs, IngestSummary};
use crate::output::{csv_bytes, num, Bundle, FileEntry};

/// Files written by a command, relative to `out_dir`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub out_dir: PathBuf,
    pub files: Vec<FileEntry>,
}

/// Loads `config_path`, applies `overrides` and validates the result.
pub fn prepare(config_path: &Path, overrides: &Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(config_path)?;
    overrides.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct RunView<'a> {
    run: u32,
    run_seed: u64,
    users: usize,
    failed_cells: &'a [CellId],
    metrics: Vec<ReportView<'a>>,
}

#[derive(Serialize)]
struct ReportView<'a> {
    mode: Mode,
    fdp: f64,
    fsp: f64,
    per_operator: &'a [GroupMetrics],
}

#[derive(Serialize)]
struct ResultsView<'a> {
    region: &'a str,
    cells: usize,
    ingest: &'a IngestSummary,
    model: &'a ModelParams,
    scenario: &'a ScenarioSpec,
    summary: &'a [SeriesSummary],
    runs: Vec<RunView<'a>>,
}

fn run_seeds(spec: &ScenarioSpec) -> Vec<u64> {
    (0..spec.runs).map(|r| seed::run_seed(spec.seed, r as u64)).collect()
}

fn importance_file(mode: Mode, modes: &[Mode]) -> String {
    if modes.len() > 1 && mode == Mode::Roaming {
        "bs_importance_roaming.csv".into()
    } else {
        "bs_importance.csv".into()
    }
}

fn write_importance(bundle: &mut Bundle, rows: &[ImportanceRow], modes: &[Mode]) -> Result<(), CliError> {
    for &mode in modes {
        let body = csv_bytes(
            &["cell_id", "operator", "delta_fdp", "delta_fsp"],
            rows.iter().filter(|r| r.mode == mode).map(|r| {
                vec![
                    r.cell.to_string(),
                    r.operator.clone(),
                    num(r.delta_fdp),
                    num(r.delta_fsp),
                ]
            }),
        )?;
        bundle.write(&importance_file(mode, modes), &body)?;
    }
    Ok(())
}

pub fn cmd_run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let inputs = load_inputs(cfg)?;
    let plan = sampling_plan(&inputs.network, &inputs.grid, &cfg.model)?;
    let result = run_scenario(&cfg.scenario, &inputs.network, &plan, &cfg.model)?;

    let mut bundle = Bundle::create(&cfg.out_dir)?;
    let view = ResultsView {
        region: inputs.network.region().id(),
        cells: inputs.network.cells().len(),
        ingest: &inputs.summary,
        model: &cfg.model,
        scenario: &cfg.scenario,
        summary: &result.summary,
        runs: result
            .runs
            .iter()
            .map(|r| RunView {
                run: r.run,
                run_seed: r.run_seed,
                users: r.users,
                failed_cells: &r.failed_cells,
                metrics: r
                    .reports
                    .iter()
                    .map(|m| ReportView {
                        mode: m.mode,
                        fdp: m.fdp,
                        fsp: m.fsp,
                        per_operator: &m.per_operator,
                    })
                    .collect(),
            })
            .collect(),
    };
    bundle.write_json("results.json", &view)?;

    let header = ["mode", "operator", "run", "fdp", "fsp"];
    let overall = result.runs.iter().flat_map(|r| {
        r.reports.iter().map(move |m| {
            vec![
                m.mode.label().into(),
                "all".into(),
                r.run.to_string(),
                num(m.fdp),
                num(m.fsp),
            ]
        })
    });
    bundle.write("fdp_fsp.csv", &csv_bytes(&header, overall)?)?;
    let by_operator = result.runs.iter().flat_map(|r| {
        r.reports.iter().flat_map(move |m| {
            m.per_operator.iter().map(move |g| {
                vec![
                    m.mode.label().into(),
                    g.operator.clone(),
                    r.run.to_string(),
                    num(g.fdp),
                    num(g.fsp),
                ]
            })
        })
    });
    bundle.write("fdp_fsp_by_operator.csv", &csv_bytes(&header, by_operator)?)?;

    if let Some(rows) = &result.importance {
        write_importance(&mut bundle, rows, cfg.scenario.mode.modes())?;
    }
    finish(bundle, "run", cfg, run_seeds(&cfg.scenario))
}

pub fn cmd_importance(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut cfg = cfg.clone();
    cfg.scenario.failure = FailureModel::SingleBsSweep;
    let inputs = load_inputs(&cfg)?;
    let plan = sampling_plan(&inputs.network, &inputs.grid, &cfg.model)?;
    let rows = importance_sweep(&cfg.scenario, &inputs.network, &plan, &cfg.model)?;
    let mut bundle = Bundle::create(&cfg.out_dir)?;
    write_importance(&mut bundle, &rows, cfg.scenario.mode.modes())?;
    finish(bundle, "importance", &cfg, run_seeds(&cfg.scenario))
}

fn file_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

#[derive(Serialize)]
struct RasterSummary {
    label: String,
    mode: Mode,
    cols: usize,
    rows: usize,
    square_m: f64,
    squares_in_region: usize,
    threshold_db: f64,
    below_threshold_fraction: f64,
}

/// Rasters for the intact network, or for the failures of run 0 when the
/// scenario injects them.
pub fn cmd_coverage(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let inputs = load_inputs(cfg)?;
    let network = &inputs.network;
    let mut series: Vec<(Mode, RasterSeries)> = Vec::new();
    if cfg.scenario.mode != ModeSelection::Roaming {
        for op in network.operators() {
            series.push((Mode::PerOperator, RasterSeries::Operator(op.clone())));
        }
    }
    if cfg.scenario.mode != ModeSelection::PerOperator {
        series.push((Mode::Roaming, RasterSeries::Roaming));
    }
    let run_seed = seed::run_seed(cfg.scenario.seed, 0);
    let cells = surviving_cells(network, &cfg.scenario.failure, run_seed)?;
    let kinds: Vec<RasterSeries> = series.iter().map(|(_, s)| s.clone()).collect();
    let rasters = coverage_rasters(network.region(), &cells, &kinds, &cfg.model, cfg.scenario.seed)?;

    let mut bundle = Bundle::create(&cfg.out_dir)?;
    let mut summary = Vec::new();
    for ((mode, _), raster) in series.iter().zip(&rasters) {
        let label = file_label(&raster.label);
        bundle.write(&format!("coverage_{label}.csv"), &raster_csv(raster)?)?;
        let ecdf = csv_bytes(
            &["sinr_db", "cum_fraction"],
            raster.ecdf().into_iter().map(|(v, f)| vec![num(v), num(f)]),
        )?;
        bundle.write(&format!("ecdf_{label}.csv"), &ecdf)?;
        summary.push(RasterSummary {
            label: raster.label.clone(),
            mode: *mode,
            cols: raster.cols,
            rows: raster.rows,
            square_m: raster.square_m,
            squares_in_region: raster.in_region.iter().filter(|&&i| i).count(),
            threshold_db: cfg.model.gamma_min_db,
            below_threshold_fraction: raster.below_threshold_fraction(cfg.model.gamma_min_db),
        });
    }
    bundle.write_json("coverage_summary.json", &summary)?;
    finish(bundle, "coverage", cfg, vec![run_seed])
}

fn raster_csv(raster: &CoverageRaster) -> Result<Vec<u8>, CliError> {
    csv_bytes(
        &["x_m", "y_m", "best_sinr_db"],
        raster.best_sinr_db.iter().enumerate().map(|(k, v)| {
            let c = raster.center(k);
            vec![num(c.x), num(c.y), num(*v)]
        }),
    )
}

fn finish(bundle: Bundle, command: &str, cfg: &RunConfig, seeds: Vec<u64>) -> Result<Outcome, CliError> {
    let out_dir = bundle.dir().to_path_buf();
    let files = bundle.finish(command, cfg, seeds)?;
    Ok(Outcome { out_dir, files })
}
