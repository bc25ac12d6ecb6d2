//! Command-line front end: configuration, input loading and result bundles.

pub mod commands;
pub mod config;
pub mod error;
pub mod inputs;
pub mod output;

pub use commands::{cmd_coverage, cmd_importance, cmd_run, prepare, Outcome};
pub use config::{Overrides, RunConfig};
pub use error::CliError;

/// Environment variable capping worker threads; `0` or unset means one per core.
pub const THREADS_ENV: &str = "CELLRES_THREADS";

/// Sizes the global worker pool from `CELLRES_THREADS`.
pub fn configure_threads() -> Result<(), CliError> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("{THREADS_ENV}={v:?} is not a thread count")))?,
        Err(_) => 0,
    };
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
