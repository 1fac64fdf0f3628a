//! Experiment driver for `limsup-core`: configuration, dispatch, result envelopes and plot data.

pub mod commands;
pub mod config;
pub mod envelope;
pub mod error;
pub mod plot;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{Command, ExperimentConfig, Flags, Format, Params};
pub use envelope::{Payload, ResultEnvelope};
pub use error::{CliError, CliResult};
pub use plot::{emit_plot_data, PlotKind};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LIMSUP_OUT_DIR";

/// Runs the configured command.
pub fn run(config: &ExperimentConfig) -> CliResult<ResultEnvelope> {
    let start = Instant::now();
    let payload = commands::dispatch(config)?;
    Ok(ResultEnvelope { config: config.clone(), wall_clock_seconds: start.elapsed().as_secs_f64(), payload })
}

/// Explicit path, else `$LIMSUP_OUT_DIR/<command>.<ext>`, else `None` for stdout.
pub fn output_path(config: &ExperimentConfig) -> Option<PathBuf> {
    if let Some(p) = &config.output.path {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty())?;
    Some(PathBuf::from(dir).join(format!("{}.{}", config.command, config.output.format.extension())))
}
