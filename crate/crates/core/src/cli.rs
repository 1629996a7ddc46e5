//! Command-line front end.
//!
//! ```text
//! pdav [SUBCOMMAND] [--config FILE] [--dt H] [--t-end T] [--perturbed]
//!      [--stride N] [--out DIR] [--seed S]
//! ```
//!
//! Subcommands are `pdav` (the default), `stabilize-compare` and `check`.
//! Flags override the config file, which overrides the reference values.
//! Exit codes: 0 on success, 1 on configuration or i/o errors, 2 when a run
//! leaves the error-vector domain (the abort time is reported).

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{load_layer, ConfigLayer};
use crate::error::Error;
use crate::harness::{run_pdav, run_stabilize_compare, ScenarioConfig, ScenarioKind};

/// Directory used when neither `--out` nor `out =` is given.
pub const DEFAULT_OUT_DIR: &str = "pdav-out";

#[derive(Debug, Parser)]
#[command(
    name = "pdav",
    version,
    about = "Pointing-direction and spin tracking simulations"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,

    /// Configuration file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Integration step in seconds (0 < dt ≤ 0.01).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Simulated duration in seconds.
    #[arg(long = "t-end", global = true)]
    t_end: Option<f64>,
    /// Give the tracking law the perturbed inertia and friction estimates.
    #[arg(long, global = true)]
    perturbed: bool,
    /// Keep every n-th sample in the CSV.
    #[arg(long, global = true)]
    stride: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for `check`.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Command {
    /// Tracking run on the spin/tilt maneuver.
    Pdav,
    /// Both stabilizers through the two setpoints.
    StabilizeCompare,
    /// Randomized property checks.
    Check,
}

impl Cli {
    fn layer(&self) -> ConfigLayer {
        ConfigLayer {
            dt: self.dt,
            t_end: self.t_end,
            perturbed: self.perturbed.then_some(true),
            stride: self.stride,
            out: self.out.clone(),
            ..Default::default()
        }
    }

    fn resolve(&self) -> Result<ScenarioConfig, Error> {
        let file = match &self.config {
            Some(path) => load_layer(path)?,
            None => ConfigLayer::default(),
        };
        let mut merged = self.layer().over(&file);
        match self.command {
            Some(Command::Pdav) => merged.scenario = Some(ScenarioKind::Pdav),
            Some(Command::StabilizeCompare) => {
                merged.scenario = Some(ScenarioKind::StabilizeCompare)
            }
            _ => {}
        }
        merged.build(ScenarioKind::Pdav)
    }
}

/// Runs the CLI with explicit argument list and output streams; returns the
/// exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };

    if let Some(Command::Check) = cli.command {
        return check(cli.seed, out, err);
    }

    let cfg = match cli.resolve() {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return 1;
        }
    };
    let dir = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));

    let result = match cfg.kind {
        ScenarioKind::Pdav => run_pdav(&cfg, cfg.perturbed).and_then(|r| {
            r.write(&dir, "")?;
            let _ = write!(out, "{}", r.metrics.to_text());
            Ok(())
        }),
        ScenarioKind::StabilizeCompare => run_stabilize_compare(&cfg).and_then(|r| {
            r.benchmark.write(&dir, "_benchmark")?;
            r.modified.write(&dir, "_modified")?;
            let _ = writeln!(out, "[benchmark]\n{}", r.benchmark.metrics.to_text());
            let _ = write!(out, "[modified]\n{}", r.modified.metrics.to_text());
            Ok(())
        }),
    };
    match result {
        Ok(()) => {
            let _ = writeln!(out, "wrote {}", dir.display());
            0
        }
        Err(e @ Error::Aborted { .. }) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn check(seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match crate::checks::run_all(seed) {
        Ok(results) => {
            for r in &results {
                let _ = writeln!(out, "{r}");
            }
            if results.iter().all(|r| r.passed()) {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

/// Entry point for the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
