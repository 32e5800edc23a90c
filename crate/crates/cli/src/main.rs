//! `dimlab`: sample benchmark manifolds, estimate intrinsic dimension of
//! point clouds, and run replicated sweeps.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dimlab::Error;

#[derive(Parser, Debug)]
#[command(name = "dimlab", version, about = "Intrinsic dimension estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a catalog manifold and write a headerless CSV.
    Sample(SampleArgs),
    /// Estimate the intrinsic dimension of a CSV point cloud.
    Estimate(EstimateArgs),
    /// Run a replicated one-factor sweep.
    Sweep(SweepArgs),
    /// Run a comparative suite over the manifold catalog.
    Suite(SuiteArgs),
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Catalog id, `M11` .. `M10`.
    #[arg(long)]
    pub manifold: String,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// `uniform`, `beta` or `beta:a,b`.
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    pub input: std::path::PathBuf,
    /// One method name, a comma-separated list, or `all`.
    #[arg(long, default_value = "all")]
    pub method: String,
    /// Select K or alpha by the stable-window rule.
    #[arg(long, conflicts_with_all = ["k", "alpha"])]
    pub tune: bool,
    /// Override the tuning grid (comma-separated).
    #[arg(long, requires = "tune")]
    pub grid: Option<String>,
    #[arg(long = "K", visible_alias = "k", id = "k")]
    pub k: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Wasserstein ground metric, `l2` or `l1`.
    #[arg(long)]
    pub metric: Option<String>,
    /// Exclude the centre point from local PCA covariances.
    #[arg(long)]
    pub neighbors_only: bool,
    /// Include DanCo in `--method all` even when p > 100.
    #[arg(long)]
    pub with_danco: bool,
    /// Machine-readable output.
    #[arg(long)]
    pub csv: bool,
    /// Field delimiter: a single character, `tab` or `space`.
    #[arg(long, default_value = ",")]
    pub delimiter: String,
    /// The first row is a header.
    #[arg(long)]
    pub header: bool,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Named design; manual flags below are used when absent.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, required_unless_present = "preset")]
    pub manifold: Option<String>,
    /// K, alpha, n, p, R, d, c or sigma.
    #[arg(long, required_unless_present = "preset")]
    pub factor: Option<String>,
    /// Comma-separated factor values.
    #[arg(long, required_unless_present = "preset")]
    pub values: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value = "uniform")]
    pub dist: String,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Tune each estimator per replicate (manual sweeps).
    #[arg(long)]
    pub tune: bool,
    #[command(flatten)]
    pub common: RunArgs,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[arg(long, default_value = "suite-500u")]
    pub preset: String,
    /// Comma-separated catalog ids; all 18 when absent.
    #[arg(long)]
    pub manifolds: Option<String>,
    #[command(flatten)]
    pub common: RunArgs,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Comma-separated method names.
    #[arg(long)]
    pub estimators: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Record wall time per row.
    #[arg(long)]
    pub timing: bool,
    /// Run replicates on one thread.
    #[arg(long)]
    pub serial: bool,
}

/// Stable exit codes: 2 user/input error, 3 I/O, 4 infeasible, 1 numerical failure.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 3,
        Error::Infeasible(_) => 4,
        Error::InvalidArgument(_)
        | Error::Unknown { .. }
        | Error::Parse { .. }
        | Error::OutOfDomain(_)
        | Error::NotSymmetric { .. }
        | Error::Degenerate(_) => 2,
        Error::NonFinite(_) | Error::NotConverged { .. } | Error::RejectionBudget(_) => 1,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("DIMLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::InvalidArgument(format!("DIMLAB_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Estimate(a) => commands::estimate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Suite(a) => commands::suite(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dimlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
