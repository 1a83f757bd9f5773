//! gcpd: graph-based change-point detection from the command line.

mod pipeline;
mod simulate;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gcpd::build::{GraphFamily, GraphSpec, MatchingMode, Metric};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gcpd",
    version,
    about = "Nonparametric change-point detection through similarity graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Single change-point scan.
    Scan(ScanArgs),
    /// Changed-interval scan.
    ScanInterval(ScanIntervalArgs),
    /// Confidence region for the change-point location.
    Ci(CiArgs),
    /// Recursive binary segmentation for multiple change-points.
    Segment(SegmentArgs),
    /// Power simulation under synthetic shift models.
    Simulate(simulate::SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum GraphArg {
    Mst,
    Mdp,
    Nng,
}

impl GraphArg {
    pub fn family(self) -> GraphFamily {
        match self {
            GraphArg::Mst => GraphFamily::Mst,
            GraphArg::Mdp => GraphFamily::Mdp,
            GraphArg::Nng => GraphFamily::Nng,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    L1,
    NetworkEdgeCount,
    NetworkEdgeCountNormalized,
    Precomputed,
}

impl MetricArg {
    pub fn metric(self) -> Metric {
        match self {
            MetricArg::Euclidean => Metric::Euclidean,
            MetricArg::L1 => Metric::L1,
            MetricArg::NetworkEdgeCount => Metric::NetworkEdgeCount,
            MetricArg::NetworkEdgeCountNormalized => Metric::NetworkEdgeCountNormalized,
            MetricArg::Precomputed => Metric::Precomputed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MatchingArg {
    Exact,
    Greedy,
}

impl MatchingArg {
    pub fn mode(self) -> MatchingMode {
        match self {
            MatchingArg::Exact => MatchingMode::Exact,
            MatchingArg::Greedy => MatchingMode::Greedy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FormatArg {
    /// Guess: directories are network sequences, `n <N>` headers are
    /// graphs, anything else is an observations matrix.
    Auto,
    Observations,
    Distance,
    Graph,
    NetworkDir,
}

/// Flags shared by the data-driven subcommands.
#[derive(Args, Clone)]
pub struct InputArgs {
    /// Input file (or directory for network sequences).
    pub input: PathBuf,
    /// Input format.
    #[arg(long, value_enum, default_value = "auto")]
    pub format: FormatArg,
    /// Similarity graph family.
    #[arg(long, value_enum, default_value = "mst")]
    pub graph: GraphArg,
    /// Graph density level (union of k orthogonal structures).
    #[arg(short, long, default_value_t = 1)]
    pub k: usize,
    /// Dissimilarity measure.
    #[arg(long, value_enum, default_value = "euclidean")]
    pub metric: MetricArg,
    /// Matching solver for MDP graphs.
    #[arg(long, value_enum, default_value = "exact")]
    pub matching: MatchingArg,
}

impl InputArgs {
    pub fn graph_spec(&self) -> GraphSpec {
        GraphSpec::new(self.graph.family(), self.k)
    }
}

#[derive(Args)]
pub struct ScanArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Smallest candidate split size; default ceil(0.05 n).
    #[arg(long)]
    pub n0: Option<usize>,
    /// Largest candidate split size; default n - n0.
    #[arg(long)]
    pub n1: Option<usize>,
    /// Significance level for reported critical values.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Monte Carlo permutation count (0 disables).
    #[arg(long, default_value_t = 0)]
    pub perms: usize,
    /// Block size for the block-permutation p-value (0 disables).
    #[arg(long, default_value_t = 0)]
    pub block_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Plot-data path (tab-separated t, R, Z).
    #[arg(long)]
    pub plot_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScanIntervalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Smallest interval length; default ceil(0.05 n).
    #[arg(long)]
    pub l0: Option<usize>,
    /// Largest interval length; default n - l0.
    #[arg(long)]
    pub l1: Option<usize>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub perms: usize,
    #[arg(long, default_value_t = 0)]
    pub block_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Region kind: the conservative one-sided region C or the two-sided
    /// partition region D.
    #[arg(long, default_value = "c")]
    pub region: String,
    /// Sub-sequence p-value method.
    #[arg(long, default_value = "analytic")]
    pub p_method: String,
    /// Permutation count when --p-method=permutation.
    #[arg(long, default_value_t = 1000)]
    pub perms: usize,
    /// Sub-sequences shorter than this never reject.
    #[arg(long, default_value_t = 20)]
    pub min_test_len: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Minimum segment length between change-points.
    #[arg(long, default_value_t = 25)]
    pub min_seg: usize,
    #[arg(long, default_value = "analytic")]
    pub p_method: String,
    #[arg(long, default_value_t = 1000)]
    pub perms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("GCP_THREADS") {
        let threads: usize = raw
            .parse()
            .with_context(|| format!("GCP_THREADS must be a number, got {raw:?}"))?;
        if threads > 0 {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .context("thread pool already configured")?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    let outcome = match cli.command {
        Command::Scan(args) => pipeline::run_scan(args),
        Command::ScanInterval(args) => pipeline::run_scan_interval(args),
        Command::Ci(args) => pipeline::run_ci(args),
        Command::Segment(args) => pipeline::run_segment(args),
        Command::Simulate(args) => simulate::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

pub(crate) fn parse_region(raw: &str) -> Result<gcpd::inference::RegionKind> {
    match raw.to_ascii_lowercase().as_str() {
        "c" => Ok(gcpd::inference::RegionKind::C),
        "d" => Ok(gcpd::inference::RegionKind::D),
        other => bail!("unknown region kind {other:?}; use c or d"),
    }
}
