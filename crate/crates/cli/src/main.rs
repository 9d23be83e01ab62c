//! `bglue`: build glued scenes from a JSON config and verify, plot or dump them.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage errors.

mod config;
mod distortion;
mod dump;
mod error;
mod orbit;
mod output;
mod scene;
mod svg;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::CliError;
use output::Output;

#[derive(Parser)]
#[command(name = "bglue", version, about = "Smooth gluing of group actions along boundaries")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; built-in defaults when absent.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Working precision in bits.
    #[arg(long, global = true, value_name = "BITS")]
    precision: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Highest seam derivative order that must pass.
    #[arg(long, global = true, value_name = "K")]
    order: Option<usize>,
    /// Seed for sampled points.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check seam smoothness of the scene's maps (and germ decay when configured).
    Verify,
    /// Iterate a word on seed points; writes a CSV and an SVG portrait.
    Orbit,
    /// Word lengths of the powers of the central element.
    Distortion {
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Write the resolved scene and map expressions as JSON.
    SceneDump,
}

fn resolve(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(b) = common.precision {
        cfg.precision_bits = b;
    }
    if let Some(d) = &common.out {
        cfg.out_dir = d.clone();
    }
    if let Some(k) = common.order {
        cfg.verify.orders = k;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let threads = match std::env::var("BGLUE_THREADS") {
        Ok(v) => Some(v.parse::<usize>().ok().filter(|n| *n > 0).ok_or_else(|| {
            CliError::Usage(format!("BGLUE_THREADS must be a positive integer, got {v:?}"))
        })?),
        Err(_) => cfg.threads,
    };
    if let Some(n) = threads {
        bglue::par::init_threads(n);
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = resolve(&cli.common)?;
    let out = Output::new(&cfg.out_dir)?;
    match cli.command {
        Command::Verify => verify::run(&cfg, &out),
        Command::Orbit => orbit::run(&cfg, &out).map(|_| true),
        Command::Distortion { n_max, radius } => {
            if let Some(n) = n_max {
                cfg.distortion.n_max = n;
            }
            if let Some(r) = radius {
                cfg.distortion.radius = r;
            }
            distortion::run(&cfg.distortion, &out).map(|_| true)
        }
        Command::SceneDump => dump::run(&cfg, &out).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("bglue: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
