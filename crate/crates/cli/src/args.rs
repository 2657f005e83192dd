//! Command-line surface.

use clap::{Args, Parser, Subcommand, ValueEnum};
use epsample::hamtree::DEFAULT_HAM_T;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "epsample", version, about = "Weighted epsilon-samples for halfplanes, with cuttings, partitions and benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Cut random lines (`--n` of them) and check every leaf by brute force.
    Cutting(Common),
    /// Build a partition of `--t` cells and report balance and probe crossings.
    Partition(Common),
    /// Draw a weighted sample of size `--k` and print it.
    Sample(Common),
    /// Sample error over all halfplanes (approximate unless `--exact`).
    Evaluate(Common),
    /// Plant an anomalous halfplane and scan for it from samples.
    Anomaly(Common),
    /// Sweep one parameter over a grid of methods and trials.
    Bench(BenchArgs),
    /// Write the SVG of a cutting or a partition.
    Render(RenderArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Cutting(_) => "cutting",
            Self::Partition(_) => "partition",
            Self::Sample(_) => "sample",
            Self::Evaluate(_) => "evaluate",
            Self::Anomaly(_) => "anomaly",
            Self::Bench(_) => "bench",
            Self::Render(_) => "render",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// random, mat, chan, chan_simple, ham or double_ham.
    #[arg(long, default_value = "ham")]
    pub method: String,
    /// Number of points, or of lines for `cutting`.
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    /// Sample size.
    #[arg(long, default_value_t = 1000)]
    pub k: usize,
    /// Partition size; defaults to `--k`.
    #[arg(long)]
    pub t: Option<usize>,
    /// Branching factor for mat and chan (defaults 16 and 22).
    #[arg(long)]
    pub b: Option<usize>,
    /// Cutting parameter.
    #[arg(long, default_value_t = 8.0)]
    pub r: f64,
    /// Candidate points per approximate ham-sandwich cut.
    #[arg(long, default_value_t = DEFAULT_HAM_T)]
    pub ham_t: usize,
    /// lines, points or dual; each builder has its own default.
    #[arg(long)]
    pub test_set: Option<String>,
    /// poly<k> or trapezoid.
    #[arg(long, default_value = "poly8")]
    pub cell: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// CSV file to read instead of generating points.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Column name or zero-based index.
    #[arg(long, default_value = "x")]
    pub x_col: String,
    #[arg(long, default_value = "y")]
    pub y_col: String,
    /// uniform, annulus or clusters[:count[:sigma]].
    #[arg(long, default_value = "uniform")]
    pub generator: String,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Leave wall time and memory out of the report.
    #[arg(long)]
    pub no_timing: bool,
    /// Pivot budget of the approximate error.
    #[arg(long, default_value_t = 200)]
    pub budget: usize,
    /// Exact error (at most 5000 points).
    #[arg(long)]
    pub exact: bool,
    /// Net points whose pairs bound the scanned halfplanes.
    #[arg(long, default_value_t = 400)]
    pub net_size: usize,
    /// Share of points inside the planted region.
    #[arg(long, default_value_t = 0.02)]
    pub fraction: f64,
    /// Random probe lines for crossing numbers.
    #[arg(long, default_value_t = 200)]
    pub probes: usize,
    #[arg(long, value_enum, default_value_t = PresampleArg::Never)]
    pub presample: PresampleArg,
    /// Tolerance override as `rel,abs`.
    #[arg(long, env = "EPSAMPLE_TOL")]
    pub tol: Option<String>,
    /// Include the full structure (cells, sample points) in the report.
    #[arg(long)]
    pub full: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PresampleArg {
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    #[value(name = "branching")]
    Branching,
    #[value(name = "input_size", alias = "input-size")]
    InputSize,
    #[value(name = "output_size", alias = "output-size")]
    OutputSize,
    #[value(name = "ham_t", alias = "ham-t")]
    HamT,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Branching => "branching",
            Self::InputSize => "input_size",
            Self::OutputSize => "output_size",
            Self::HamT => "ham_t",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub axis: Axis,
    /// Comma-separated axis values; per-axis defaults otherwise.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<usize>>,
    /// Comma-separated methods; per-axis defaults otherwise.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Worker threads for grid cells. Timings are only comparable with 1.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// CSV output path; stdout when neither this nor `--out` is given.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also plant an anomaly per trial and record the discrepancy error.
    #[arg(long)]
    pub anomaly: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RenderWhat {
    Cutting,
    Partition,
}

#[derive(Args, Debug, Clone)]
pub struct RenderArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub what: RenderWhat,
}
