//! `kleinbox` - Klein-tunneling box laboratory.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric
//! non-convergence or solver failure, 4 in-run acceptance check failed.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use kleinbox_core::config::RunConfig;
use kleinbox_core::error::PipelineError;
use kleinbox_core::presets::PresetId;

#[derive(Debug, Parser)]
#[command(name = "kleinbox", version, about = "Quantized Klein tunneling in a stepped Dirac box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Continuum and lattice window levels side by side.
    Levels(LevelsArgs),
    /// LDOS heatmaps of the half chains and the whole system.
    Ldos(LdosArgs),
    /// Full forward + inverse run with named checks and a manifest.
    Pipeline(PipelineArgs),
}

#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Experiment preset: e1, e2, e3 or e4.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Key=value configuration file (overrides --preset).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the disorder seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the step height V0 (MHz).
    #[arg(long)]
    v0: Option<f64>,
    /// Override the disorder strength (MHz).
    #[arg(long)]
    noise: Option<f64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Output format for tabular artifacts.
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
}

#[derive(Debug, Args)]
struct LevelsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Print the particle-hole symmetry defect max |E_n + E_mirror - V0|.
    #[arg(long)]
    symmetric_check: bool,
}

#[derive(Debug, Args)]
struct LdosArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lorentzian broadening (MHz).
    #[arg(long, default_value_t = 2.5)]
    gamma: f64,
    /// Frequency grid points.
    #[arg(long, default_value_t = 1200)]
    points: usize,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Disorder seeds in the recovery ensemble.
    #[arg(long, default_value_t = 100)]
    seeds: usize,
    /// Print the parameter-recovery summary table.
    #[arg(long)]
    summary: bool,
    /// Resonance width of the synthetic spectroscopy (MHz).
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// Sampling step of exported spinor fields (mm).
    #[arg(long)]
    grid_step: Option<f64>,
    /// Write the per-site reflection traces.
    #[arg(long)]
    write_traces: bool,
    /// Reproduce a previous run from its manifest (overrides other flags).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn load_config(common: &CommonArgs) -> Result<RunConfig, ExitCode> {
    let mut cfg = if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path).map_err(|e| {
            eprintln!("error: cannot read {}: {e}", path.display());
            ExitCode::from(2)
        })?;
        RunConfig::parse(&text).map_err(|e| {
            eprintln!("error: {e}");
            ExitCode::from(2)
        })?
    } else {
        let id = match &common.preset {
            Some(name) => PresetId::parse(name).map_err(|e| {
                eprintln!("error: {e}");
                ExitCode::from(2)
            })?,
            None => PresetId::E1,
        };
        RunConfig::preset(id)
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(v0) = common.v0 {
        cfg.v0_mhz = v0;
    }
    if let Some(noise) = common.noise {
        cfg.disorder_sigma_mhz = noise;
    }
    // Validate up front so bad values exit with the config code.
    if let Err(e) = cfg.params() {
        eprintln!("error: {e}");
        return Err(ExitCode::from(2));
    }
    Ok(cfg)
}

fn exit_code_for(err: &PipelineError) -> ExitCode {
    match err {
        PipelineError::Config(_) => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("KLEINBOX_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Levels(args) => {
            let cfg = match load_config(&args.common) {
                Ok(c) => c,
                Err(code) => return code,
            };
            commands::levels::run(&cfg, &args.common, args.symmetric_check)
        }
        Command::Ldos(args) => {
            let cfg = match load_config(&args.common) {
                Ok(c) => c,
                Err(code) => return code,
            };
            commands::ldos::run(&cfg, &args.common, args.gamma, args.points)
        }
        Command::Pipeline(args) => {
            if let Some(path) = &args.manifest {
                commands::pipeline::replay(path)
            } else {
                let cfg = match load_config(&args.common) {
                    Ok(c) => c,
                    Err(code) => return code,
                };
                commands::pipeline::run(&cfg, &args)
            }
        }
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
