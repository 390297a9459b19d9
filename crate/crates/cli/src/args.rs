use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hypercolor",
    version,
    about = "Random hypergraph 2-coloring at positive temperature"
)]
pub struct Cli {
    /// Worker threads; output bytes never depend on it.
    #[arg(long, global = true, env = "HYPERCOLOR_THREADS", value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    /// Result file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a hypergraph (or a planted instance) and write it in text format.
    Gen(GenArgs),
    /// Exact ln Z by enumeration.
    Exact(ExactArgs),
    /// Exact cluster size ln C around a coloring.
    Cluster(ClusterArgs),
    /// First and second moments; optionally a Monte Carlo check.
    Moments(MomentsArgs),
    /// Phase-diagram quantities at one (d, k, β).
    Phase(PhaseArgs),
    /// Λ_β on a grid of α, with the second-moment verdict.
    ScanAlpha(ScanAlphaArgs),
    /// The zero β_c of Σ and its expansion.
    BetaCrit(BetaCritArgs),
    /// Core/backbone/rest/free decomposition of a colored hypergraph.
    Decompose(DecomposeArgs),
    /// Decomposition census over planted instances.
    Census(CensusArgs),
    /// Measured and analytic condensation gap over a β grid.
    GapScan(GapScanArgs),
    /// ln Z under the null and the planted model.
    PlantedNull(PlantedNullArgs),
}

/// Exactly one way of giving the density.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DensityArgs {
    /// Mean degree d.
    #[arg(long)]
    pub d: Option<f64>,
    /// d/k.
    #[arg(long)]
    pub ratio: Option<f64>,
    /// Offset c = d/k − (2^{k−1} − 1) ln2.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// c / ln2.
    #[arg(long, allow_hyphen_values = true)]
    pub c_over_ln2: Option<f64>,
}

/// Edge count for the null models: `--m`, or `m = ⌈dn/k⌉` from `--d`.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SizeArgs {
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// gnp, gnm or gnm_rep; ignored with --planted.
    #[arg(long, default_value = "gnm")]
    pub model: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub size: SizeArgs,
    #[arg(long, default_value_t = 0.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Draw from the planted model (needs --d) and write σ to --coloring-out.
    #[arg(long, requires = "coloring_out")]
    pub planted: bool,
    /// Condition the planted coloring on balance.
    #[arg(long, requires = "planted")]
    pub balanced: bool,
    #[arg(long)]
    pub coloring_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    /// Hypergraph file.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub beta: f64,
    /// all, balanced, imbalanced:ε or energy-window:ε.
    #[arg(long, default_value = "all")]
    pub restriction: String,
    #[arg(long, default_value_t = hypercolor::enumeration::DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Coloring file.
    #[arg(long)]
    pub coloring: PathBuf,
    #[arg(long)]
    pub beta: f64,
    /// Overlap threshold θ: colorings with ⟨σ,τ⟩ ≥ θn.
    #[arg(long, default_value_t = hypercolor::enumeration::DEFAULT_CLUSTER_OVERLAP, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = hypercolor::enumeration::DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomentCheck {
    /// Mean Z over gnm_rep draws against E[Z].
    FirstMoment,
    /// Mean (1/n) ln Z over gnp draws against the first-moment bound.
    FreeEntropy,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub size: SizeArgs,
    #[arg(long)]
    pub beta: f64,
    /// Also evaluate ln Z(α) at this overlap.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Run a Monte Carlo check instead of printing the formulas.
    #[arg(long, value_enum, requires = "trials")]
    pub check: Option<MomentCheck>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub beta: f64,
    /// Half-width of the indeterminate band in c; calibrated default.
    #[arg(long)]
    pub band: Option<f64>,
    /// Also run the second-moment verdict with this many grid steps.
    #[arg(long)]
    pub verdict_grid: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ScanAlphaArgs {
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub beta: f64,
    /// Grid steps on [0, 1].
    #[arg(long, default_value_t = hypercolor::phase::MIN_VERDICT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Args)]
pub struct BetaCritArgs {
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long, default_value_t = hypercolor::phase::DEFAULT_ROOT_TOL)]
    pub tol: f64,
    #[arg(long)]
    pub band: Option<f64>,
}

/// Threshold profile: `standard`, `calibrated` or `S,E` (scaled core thresholds).
#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long, default_value = "calibrated")]
    pub thresholds: String,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub coloring: PathBuf,
    #[arg(long)]
    pub beta: f64,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
}

#[derive(Debug, Args)]
pub struct CensusArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub density: DensityArgs,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
}

#[derive(Debug, Args)]
pub struct GapScanArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[command(flatten)]
    pub density: DensityArgs,
    /// Comma-separated β values, strictly increasing.
    #[arg(long, value_delimiter = ',', required = true)]
    pub betas: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
}

#[derive(Debug, Args)]
pub struct PlantedNullArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub d: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}
