use std::path::PathBuf;
use std::process::ExitCode;

use cellres_cli::{
    cmd_coverage, cmd_importance, cmd_run, configure_threads, prepare, CliError, Outcome, Overrides, RunConfig,
};
use cellres_core::scenarios::ModeSelection;
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cellres",
    version,
    about = "Cellular network resilience under failures and national roaming"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo FDP/FSP experiment.
    Run(Common),
    /// Single-cell failure sweep.
    Importance(Common),
    /// 50 m SINR coverage rasters and ECDFs.
    Coverage(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PerOperator,
    Roaming,
    Both,
}

#[derive(Args)]
struct Common {
    /// Run configuration (JSON).
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    /// Isolated failure probability per cell.
    #[arg(long)]
    p_iso: Option<f64>,
    /// Correlated failure radius around the disaster center, m.
    #[arg(long)]
    r_fail: Option<f64>,
    /// Percent increase of active users.
    #[arg(long)]
    p_pop: Option<f64>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            runs: self.runs,
            p_iso: self.p_iso,
            r_fail: self.r_fail,
            p_pop: self.p_pop,
            mode: self.mode.map(|m| match m {
                ModeArg::PerOperator => ModeSelection::PerOperator,
                ModeArg::Roaming => ModeSelection::Roaming,
                ModeArg::Both => ModeSelection::Both,
            }),
            out_dir: self.out_dir.clone(),
        }
    }
}

type CommandFn = fn(&RunConfig) -> Result<Outcome, CliError>;

fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let (args, command): (&Common, CommandFn) = match &cli.command {
        Command::Run(a) => (a, cmd_run),
        Command::Importance(a) => (a, cmd_importance),
        Command::Coverage(a) => (a, cmd_coverage),
    };
    let cfg = prepare(&args.config, &args.overrides())?;
    let outcome = command(&cfg)?;
    for f in &outcome.files {
        println!("{}", outcome.out_dir.join(&f.path).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
