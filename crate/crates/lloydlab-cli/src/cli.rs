//! Argument definitions for the `lloydlab` binary.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// K-Means clustering toolkit: generate mixture datasets, cluster them with
/// serial or shared-memory parallel strategies, and benchmark the scaling.
#[derive(Debug, Parser)]
#[command(name = "lloydlab", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic Gaussian-mixture dataset as CSV.
    Gen(GenArgs),
    /// Cluster a dataset CSV and write the result bundle plus plot data.
    Cluster(ClusterArgs),
    /// Run a timed strategy/thread sweep and emit speedup tables.
    Bench(BenchArgs),
    /// Compare two result bundles for equivalent clustering.
    Compare(CompareArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Mixture spec JSON file (fields: dim, seed, components[{weight, mean, cov}]).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub spec: Option<PathBuf>,
    /// Built-in preset name (e.g. 2d-500k, 3d-1m).
    #[arg(long)]
    pub preset: Option<String>,
    /// Number of points; required with --spec, overrides the preset size.
    #[arg(long, required_unless_present = "preset")]
    pub n: Option<usize>,
    /// Override the seed baked into the spec or preset.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; receives dataset.csv and meta.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Append each point's true component as a final integer column.
    #[arg(long)]
    pub with_labels: bool,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Input dataset CSV (every column a coordinate).
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Number of clusters.
    #[arg(long)]
    pub k: usize,
    /// Execution strategy.
    #[arg(long, default_value = "serial")]
    pub strategy: String,
    /// Worker threads for the parallel strategies.
    #[arg(long, env = "LLOYDLAB_THREADS", default_value_t = 1)]
    pub threads: usize,
    /// Convergence tolerance on the summed squared center shift.
    #[arg(long = "tol", default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Iteration cap; hitting it is reported, not fatal.
    #[arg(long = "max-iters", default_value_t = 500)]
    pub max_iterations: usize,
    /// Seed for the initial center selection.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for assignments.csv, centroids.csv, trace.csv,
    /// meta.json, and per-cluster plot files.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated preset names to generate and benchmark.
    #[arg(long, value_delimiter = ',', required = true)]
    pub presets: Vec<String>,
    /// Number of clusters for every cell.
    #[arg(long)]
    pub k: usize,
    /// Strategies to sweep (a serial baseline is always timed).
    #[arg(long, value_delimiter = ',', default_value = "persistent,forkjoin")]
    pub strategies: Vec<String>,
    /// Thread counts to sweep.
    #[arg(long, env = "LLOYDLAB_THREADS", value_delimiter = ',', default_value = "2,4,8")]
    pub threads: Vec<usize>,
    /// Timed repeats per cell (after one discarded warm-up).
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Seed shared by every run in the sweep.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "tol", default_value_t = 1e-6)]
    pub tolerance: f64,
    #[arg(long = "max-iters", default_value_t = 500)]
    pub max_iterations: usize,
    /// Output directory for bench.csv, speedup.json, and figure data.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// First result bundle directory.
    #[arg(long)]
    pub a: PathBuf,
    /// Second result bundle directory.
    #[arg(long)]
    pub b: PathBuf,
}
