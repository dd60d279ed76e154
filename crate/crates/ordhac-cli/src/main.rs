//! `ordhac` — command line harness around the order-preserving hierarchical
//! clustering library: instance generation, clustering, scoring, and
//! benchmark experiments.
//!
//! Exit codes: 0 success, 2 invalid parameters or malformed input, 3 search
//! budget exceeded, 4 I/O failure.

mod bench;
mod bundle;
mod commands;
mod svg;

use std::fs;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use ordhac::clustering::ClusteringError;
use serde_json::{Map, Value};

/// A command failure carrying its process exit code.
#[derive(Debug)]
pub enum Fail {
    /// Invalid parameters or malformed input files (exit 2).
    Validation(String),
    /// An exhaustive search exceeded its state budget (exit 3).
    Budget(String),
    /// Reading or writing a file failed (exit 4).
    Io(String),
}

impl Fail {
    pub fn message(&self) -> &str {
        match self {
            Fail::Validation(m) | Fail::Budget(m) | Fail::Io(m) => m,
        }
    }

    pub fn code(&self) -> i32 {
        match self {
            Fail::Validation(_) => 2,
            Fail::Budget(_) => 3,
            Fail::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for Fail {
    fn from(e: std::io::Error) -> Self {
        Fail::Io(e.to_string())
    }
}

impl From<ClusteringError> for Fail {
    fn from(e: ClusteringError) -> Self {
        match e {
            ClusteringError::SearchBudgetExceeded { .. } => Fail::Budget(e.to_string()),
            other => Fail::Validation(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ordhac",
    version,
    about = "Order-preserving hierarchical agglomerative clustering toolkit",
    propagate_version = true
)]
struct Cli {
    /// JSON object with default parameter values for the invoked command
    /// (keys are the snake_case flag names); explicit flags win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance bundle: a random ordered dissimilarity space, or
    /// planted copies of a base instance
    Gen(GenArgs),
    /// Cluster an instance bundle and write result.json / merges.json
    Cluster(ClusterArgs),
    /// Score a results file against its instance bundle into metrics.json
    Eval(EvalArgs),
    /// Benchmark experiments writing CSV (and optional SVG) output
    #[command(subcommand)]
    Bench(BenchCommand),
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Expected solution quality of the randomized method as the sample
    /// count grows, bootstrapped from a pool of runs per space
    Convergence(ConvergenceArgs),
    /// Ordered method vs. classical and saturated baselines on planted-copy
    /// instances over a grid of cross-copy offsets
    Compare(CompareArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// Elements of a random instance
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Order edge probability of a random instance
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Ties per dissimilarity level of a random instance
    #[arg(long, default_value_t = 1)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Base instance bundle; switches to planted-copies generation
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Copies of the base (default: ceil(200 / base size), at least 2)
    #[arg(long)]
    pub copies: Option<usize>,
    /// Cross-copy distance offset (planted mode)
    #[arg(long, default_value_t = 0.25)]
    pub alpha: f64,
    /// Cross-copy noise standard deviation (planted mode)
    #[arg(long, default_value_t = 0.10)]
    pub sigma: f64,
    /// Output bundle directory
    #[arg(short, long, default_value = "instance")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ClusterArgs {
    /// ordered | classical | plus | exact
    #[arg(long, default_value = "ordered")]
    pub method: String,
    /// single | average | complete
    #[arg(long, default_value = "single")]
    pub linkage: String,
    /// Samples of the randomized method (method "ordered")
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Completion offset above the dendrogram diameter
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    /// Exponent of the fit norm
    #[arg(long, default_value_t = 1)]
    pub pnorm: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Saturation height for comparable pairs (method "plus")
    #[arg(long, default_value_t = 1.0)]
    pub max: f64,
    /// State budget of the exhaustive search (method "exact")
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: usize,
    /// Absolute slack when detecting tied minima
    #[arg(long)]
    pub tie_abs: Option<f64>,
    /// Relative slack when detecting tied minima
    #[arg(long)]
    pub tie_rel: Option<f64>,
    /// Instance bundle directory
    #[arg(short, long, default_value = "instance")]
    pub instance: PathBuf,
    /// Output directory (default: the instance directory)
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Instance bundle directory
    #[arg(short, long, default_value = "instance")]
    pub instance: PathBuf,
    /// Results file (default: <instance>/result.json)
    #[arg(long)]
    pub results: Option<PathBuf>,
    /// Metrics output file (default: <instance>/metrics.json)
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ConvergenceArgs {
    /// Elements per random space
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Order edge probability
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Ties per dissimilarity level
    #[arg(long, default_value_t = 3)]
    pub t: usize,
    /// Random spaces to average over
    #[arg(long, default_value_t = 10)]
    pub spaces: usize,
    /// Independent runs drawn per space
    #[arg(long, default_value_t = 100)]
    pub pool: usize,
    /// Bootstrap draws per sample count
    #[arg(long, default_value_t = 100)]
    pub draws: usize,
    /// Comma-separated sample counts to evaluate
    #[arg(long, default_value = "1,2,5,10,20,40")]
    pub grid: String,
    /// Comma-separated linkages
    #[arg(long, default_value = "single,average,complete")]
    pub linkage: String,
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub pnorm: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// State budget for the exhaustive reference; beyond it the best pool
    /// sample serves as reference
    #[arg(long, default_value_t = 50_000_000)]
    pub budget: usize,
    /// Output directory for bench.csv / bench_meta.json / bench.svg
    #[arg(short, long, default_value = "bench")]
    pub out: PathBuf,
    /// Also write bench.svg
    #[arg(long)]
    pub svg: bool,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Cross-copy offset grid: "start:stop:step" (inclusive) or comma list
    #[arg(long, default_value = "0.10:0.50:0.05")]
    pub alpha: String,
    /// Planted instances per offset
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
    /// Copies of the base (default: ceil(200 / base size), at least 2)
    #[arg(long)]
    pub copies: Option<usize>,
    /// Cross-copy noise standard deviation
    #[arg(long, default_value_t = 0.10)]
    pub sigma: f64,
    /// Samples of the randomized method
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub pnorm: u32,
    /// Saturation height for the "plus" baseline
    #[arg(long, default_value_t = 1.0)]
    pub max: f64,
    /// Comma-separated linkages
    #[arg(long, default_value = "single,average,complete")]
    pub linkage: String,
    /// Base bundle shared by all instances; otherwise a random base is
    /// generated per instance index
    #[arg(long)]
    pub base: Option<PathBuf>,
    /// Elements of generated bases
    #[arg(long, default_value_t = 15)]
    pub base_n: usize,
    /// Order edge probability of generated bases
    #[arg(long, default_value_t = 0.25)]
    pub base_p: f64,
    /// Ties per level of generated bases
    #[arg(long, default_value_t = 1)]
    pub base_t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for bench.csv / bench_runs.csv / bench.svg
    #[arg(short, long, default_value = "bench")]
    pub out: PathBuf,
    /// Also write bench.svg
    #[arg(long)]
    pub svg: bool,
}

/// Fills `slot` from the config file unless the flag was given explicitly.
fn overlay_field<T: serde::de::DeserializeOwned>(
    matches: &ArgMatches,
    cfg: &Map<String, Value>,
    id: &str,
    slot: &mut T,
) -> Result<(), Fail> {
    if matches!(matches.value_source(id), Some(ValueSource::CommandLine)) {
        return Ok(());
    }
    if let Some(value) = cfg.get(id) {
        *slot = serde_json::from_value(value.clone())
            .map_err(|e| Fail::Validation(format!("config key {id:?}: {e}")))?;
    }
    Ok(())
}

/// Overlays every listed field and rejects config keys the command lacks.
macro_rules! overlay {
    ($matches:expr, $cfg:expr, $args:expr, { $($field:ident),* $(,)? }) => {{
        let known: &[&str] = &[$(stringify!($field)),*];
        for key in $cfg.keys() {
            if !known.contains(&key.as_str()) {
                return Err(Fail::Validation(format!(
                    "unknown config key {key:?} for this command"
                )));
            }
        }
        $( overlay_field($matches, $cfg, stringify!($field), &mut $args.$field)?; )*
    }};
}

fn load_config(path: Option<&Path>) -> Result<Map<String, Value>, Fail> {
    let Some(path) = path else {
        return Ok(Map::new());
    };
    let raw = fs::read_to_string(path)?;
    match serde_json::from_str::<Value>(&raw) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Fail::Validation("config file must be a JSON object".into())),
        Err(e) => Err(Fail::Validation(format!("malformed config file: {e}"))),
    }
}

fn run() -> Result<(), Fail> {
    let matches = Cli::command().get_matches();
    let cli = Cli::from_arg_matches(&matches).unwrap_or_else(|e| e.exit());
    let cfg = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Gen(mut args) => {
            let sub = matches.subcommand_matches("gen").expect("gen matched");
            overlay!(sub, &cfg, args, { n, p, t, seed, base, copies, alpha, sigma, out });
            commands::run_gen(args)
        }
        Command::Cluster(mut args) => {
            let sub = matches.subcommand_matches("cluster").expect("cluster matched");
            overlay!(sub, &cfg, args, {
                method, linkage, samples, epsilon, pnorm, seed, max, budget,
                tie_abs, tie_rel, instance, out,
            });
            commands::run_cluster(args)
        }
        Command::Eval(mut args) => {
            let sub = matches.subcommand_matches("eval").expect("eval matched");
            overlay!(sub, &cfg, args, { instance, results, out });
            commands::run_eval(args)
        }
        Command::Bench(bench_command) => {
            let bench_matches = matches.subcommand_matches("bench").expect("bench matched");
            match bench_command {
                BenchCommand::Convergence(mut args) => {
                    let sub = bench_matches
                        .subcommand_matches("convergence")
                        .expect("convergence matched");
                    overlay!(sub, &cfg, args, {
                        n, p, t, spaces, pool, draws, grid, linkage, epsilon,
                        pnorm, seed, budget, out, svg,
                    });
                    bench::run_convergence(&args)
                }
                BenchCommand::Compare(mut args) => {
                    let sub = bench_matches
                        .subcommand_matches("compare")
                        .expect("compare matched");
                    overlay!(sub, &cfg, args, {
                        alpha, instances, copies, sigma, samples, epsilon, pnorm,
                        max, linkage, base, base_n, base_p, base_t, seed, out, svg,
                    });
                    bench::run_compare(&args)
                }
            }
        }
    }
}

fn main() {
    if let Err(failure) = run() {
        eprintln!("error: {}", failure.message());
        std::process::exit(failure.code());
    }
}
