use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use pindex_core::sweep::{DEFAULT_POINTS, DEFAULT_TAU_MAX, DEFAULT_TAU_MIN};

/// Detect index-two behaviour of matrix pencils from eigenvalue growth under
/// small perturbations.
#[derive(Debug, Parser)]
#[command(name = "pindex", version)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,

    /// Seed for every random draw.
    #[arg(long, global = true, env = "PINDEX_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Directory for curve files, plot script and run manifest.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Record the wall-clock time in the manifest.
    #[arg(long, global = true)]
    pub timestamp: bool,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Block split and index-two structure report for a pencil.
    Structure(StructureArgs),
    /// Deterministic sweep `|λ(τ)|` of `(E + τI, A)` with bounds.
    Sweep(SweepArgs),
    /// Randomized sweep of `M + τG` with Ginibre `G`.
    Randomized(RandomizedArgs),
    /// Slope segmentation and verdict for a curve written by this tool.
    Classify(ClassifyArgs),
    /// Generate a benchmark pencil and run both methods on it.
    Bench(BenchArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Structure(_) => "structure",
            Command::Sweep(_) => "sweep",
            Command::Randomized(_) => "randomized",
            Command::Classify(_) => "classify",
            Command::Bench(_) => "bench",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PencilFiles {
    /// Matrix Market file holding `E`.
    #[arg(long = "E", value_name = "FILE")]
    pub e: PathBuf,
    /// Matrix Market file holding `A`.
    #[arg(long = "A", value_name = "FILE")]
    pub a: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long, default_value_t = DEFAULT_TAU_MIN)]
    pub tau_min: f64,
    #[arg(long, default_value_t = DEFAULT_TAU_MAX)]
    pub tau_max: f64,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    pub points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Envelope {
    None,
    Thm1,
    DeltaE0,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StructureArgs {
    #[command(flatten)]
    pub pencil: PencilFiles,
    /// Multiply both `E` and `A` before analysis.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Eigenvalues of `E` at or below this count as zero.
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Size of an admissible `A22`; it is tested against max(1e-10‖A‖, δ).
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub pencil: PencilFiles,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Perturbation size assumed by the bounds (default e^-15).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Envelope::Thm1)]
    pub envelope: Envelope,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long)]
    pub rank_tol: Option<f64>,
    /// Format of the curve printed to standard output when --out is absent.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RandomizedArgs {
    /// Matrix to perturb directly; must have operator norm at most 1.
    #[arg(long = "M", value_name = "FILE", conflicts_with_all = ["e", "a"])]
    pub m: Option<PathBuf>,
    /// Pencil to map through a Cayley transform first.
    #[arg(long = "E", value_name = "FILE", requires = "a")]
    pub e: Option<PathBuf>,
    #[arg(long = "A", value_name = "FILE", requires = "e")]
    pub a: Option<PathBuf>,
    /// Cayley parameter; without it h = 1, 1/2, 1/4, … is tried.
    #[arg(long)]
    pub h: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Perturbation size for the probabilistic band (default e^-15).
    #[arg(long)]
    pub delta: Option<f64>,
    /// Draw a fresh Ginibre matrix at every τ.
    #[arg(long)]
    pub resample: bool,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClassifyArgs {
    /// Curve in JSON format.
    #[arg(long = "in", value_name = "FILE")]
    pub input: PathBuf,
    #[arg(long, default_value_t = pindex_core::slope::DEFAULT_WINDOW)]
    pub window: usize,
    #[arg(long, default_value_t = pindex_core::slope::DEFAULT_SLOPE_TOL)]
    pub slope_tol: f64,
    #[arg(long, default_value_t = pindex_core::slope::DEFAULT_MIN_DECADES)]
    pub min_decades: f64,
    /// `json` prints the full verdict record instead of text.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Toy,
    Congruence,
    StringsA,
    StringsB,
    Analytic,
    Perturbed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Methods {
    One,
    Two,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub family: Family,
    /// Half size for toy models (pencil size 2n), string count for strings.
    #[arg(long)]
    pub n: Option<usize>,
    /// Small parameter of the strings models (default e^-15).
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_enum, default_value_t = Methods::Both)]
    pub method: Methods,
    #[command(flatten)]
    pub grid: GridArgs,
    /// δ for the deterministic bounds; defaults to e^-15, or 3ε for strings.
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rank_tol: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long)]
    pub h: Option<f64>,
    /// Strings models: bounds on the Q = I reduction instead of Q-weighted.
    #[arg(long)]
    pub reduced: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
