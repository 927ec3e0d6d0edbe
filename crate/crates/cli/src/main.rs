//! Simulation CLI for the hierarchical fading code.
//!
//! Subcommands: `capacity` (channel limit for the configured profile),
//! `construct` (per-index reliability CSV), `plan` (resolved code plan as
//! JSON), `simulate` (one point), `sweep` (full grid). All randomness is
//! derived from the configured seed; rerunning a command reproduces its
//! output byte for byte unless `--timing` is on.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use polarfade::channel::FadingProfile;
use polarfade::construction;
use polarfade::metrics::ergodic_capacity;
use polarfade::scheme::{build_plan, PlanSummary, SchemeConfig};
use polarfade::sim::run_batch;

use config::{snr_from_db, ExperimentConfig, Overrides};
use output::ResultRow;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Io(String),
    Runtime(String),
}

#[derive(Parser)]
#[command(name = "polarfade", version, about = "Hierarchical polar coding over block-fading channels")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the TOML configuration
    #[arg(long)]
    config: PathBuf,
    /// Construction method override
    #[arg(long, value_parser = ["bound", "genie"])]
    method: Option<String>,
    /// Master seed override
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Trial count override
    #[arg(long)]
    trials: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Record wall-clock seconds per row; off keeps output byte-stable
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the state-informed channel capacity for the profile
    Capacity(CommonArgs),
    /// Dump one state's reliability vector as CSV (index,z,method)
    Construct {
        #[command(flatten)]
        common: CommonArgs,
        /// Fading state index, 0 = worst
        #[arg(long, default_value_t = 0)]
        state: usize,
        /// Output path (default: stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the resolved code plan as JSON
    Plan(CommonArgs),
    /// Simulate the single configured point
    Simulate(RunArgs),
    /// Simulate every point of the configured sweep grid
    Sweep(RunArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(AppError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            2
        }
        Err(AppError::Io(msg)) => {
            eprintln!("io error: {msg}");
            3
        }
        Err(AppError::Runtime(msg)) => {
            eprintln!("runtime error: {msg}");
            3
        }
    };
    std::process::exit(code);
}

fn dispatch(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Cmd::Capacity(common) => {
            let cfg = load(&common)?;
            let profile = profile_at(&cfg, cfg.snr_dbs[0])?;
            let c = ergodic_capacity(&profile, profile.snr())
                .map_err(|e| AppError::Config(e.to_string()))?;
            println!("{c}");
            Ok(())
        }
        Cmd::Construct { common, state, out } => {
            let cfg = load(&common)?;
            let text = construct_csv(&cfg, state)?;
            write_out(out.as_deref(), &text)
        }
        Cmd::Plan(common) => {
            let cfg = load(&common)?;
            let plan = build_plan(&scheme_config(&cfg, cfg.ns[0], cfg.bs[0], cfg.snr_dbs[0], cfg.epsilons[0])?)
                .map_err(|e| AppError::Config(e.to_string()))?;
            let summary = PlanSummary::from_plan(&plan);
            let mut text = serde_json::to_string_pretty(&summary)
                .map_err(|e| AppError::Runtime(e.to_string()))?;
            text.push('\n');
            write_out(None, &text)
        }
        Cmd::Simulate(args) => run_points(args, false),
        Cmd::Sweep(args) => run_points(args, true),
    }
}

fn load(common: &CommonArgs) -> Result<ExperimentConfig, AppError> {
    let over = Overrides {
        method: common.method.clone(),
        seed: common.seed,
        trials: None,
    };
    config::load(&common.config, &over)
}

fn profile_at(cfg: &ExperimentConfig, snr_db: f64) -> Result<FadingProfile, AppError> {
    FadingProfile::with_snr(cfg.gains.clone(), cfg.probs.clone(), snr_from_db(snr_db))
        .map_err(|e| AppError::Config(e.to_string()))
}

fn scheme_config(
    cfg: &ExperimentConfig,
    n: usize,
    b: usize,
    snr_db: f64,
    epsilon: f64,
) -> Result<SchemeConfig, AppError> {
    Ok(SchemeConfig {
        block_len: n,
        blocks: b,
        profile: profile_at(cfg, snr_db)?,
        epsilon,
        method: cfg.method,
        construction_seed: cfg.seed,
    })
}

fn construct_csv(cfg: &ExperimentConfig, state: usize) -> Result<String, AppError> {
    if state >= cfg.state_count() {
        return Err(AppError::Config(format!(
            "state {state} out of range for {} states",
            cfg.state_count()
        )));
    }
    let profile = profile_at(cfg, cfg.snr_dbs[0])?;
    let crossovers = profile.crossovers().map_err(|e| AppError::Config(e.to_string()))?;
    let vectors =
        construction::state_reliabilities(&crossovers, cfg.ns[0], cfg.method, cfg.seed)
            .map_err(|e| AppError::Config(e.to_string()))?;
    let mut text = String::from("index,z,method\n");
    for (i, &z) in vectors[state].scores().iter().enumerate() {
        let z = if z == 0.0 { 0.0 } else { z };
        text.push_str(&format!("{i},{z},{}\n", cfg.method_name));
    }
    Ok(text)
}

fn run_points(args: RunArgs, sweep: bool) -> Result<(), AppError> {
    let over = Overrides {
        method: args.common.method.clone(),
        seed: args.common.seed,
        trials: args.trials,
    };
    let cfg = config::load(&args.common.config, &over)?;
    if let Some(workers) = args.workers {
        if workers == 0 {
            return Err(AppError::Config("workers must be at least 1".to_string()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| AppError::Runtime(format!("worker pool: {e}")))?;
    }

    let points = if sweep {
        cfg.grid()
    } else {
        vec![(cfg.ns[0], cfg.bs[0], cfg.snr_dbs[0], cfg.epsilons[0])]
    };

    let mut rows = Vec::with_capacity(points.len());
    for (idx, &(n, b, snr_db, epsilon)) in points.iter().enumerate() {
        let mut row = ResultRow::error_row(
            n,
            b,
            cfg.state_count(),
            snr_db,
            epsilon,
            &cfg.method_name,
            cfg.seed,
            cfg.trials,
        );
        // a point whose plan cannot be built stays an all-zero echo row
        if let Ok(scheme) = scheme_config(&cfg, n, b, snr_db, epsilon) {
            if let Ok(plan) = build_plan(&scheme) {
                row.rate = plan.rate();
                row.capacity = plan.capacity;
                row.gap = plan.gap;
                let start = Instant::now();
                let stats = run_batch(&plan, cfg.seed, idx as u64, cfg.trials)
                    .map_err(|e| AppError::Runtime(e.to_string()))?;
                row.fill_stats(&stats);
                if args.timing {
                    row.seconds = start.elapsed().as_secs_f64();
                }
            }
        }
        rows.push(row);
    }

    let text = match args.format.as_str() {
        "json" => output::to_json(&rows),
        _ => output::to_csv(&rows),
    };
    write_out(args.out.as_deref(), &text)
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), AppError> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| AppError::Io(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
