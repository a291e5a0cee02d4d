use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gblearn::labeling::Target;
use gblearn::sampler::SamplingMode;

#[derive(Parser, Debug)]
#[command(name = "gblearn", version, about = "Random binomial ideals, their Gröbner bases, and models that predict basis complexity")]
pub struct Cli {
    /// File of `key=value` lines used as defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Sample random binomial ideals.
    Generate(GenerateArgs),
    /// Compute reduced Gröbner basis size and maximum degree for each ideal.
    Label(LabelArgs),
    /// Compute the engineered feature table.
    Features(FeaturesArgs),
    /// Rewrite an ideals file as encodings, optionally in canonical order.
    Encode(EncodeArgs),
    /// Draw a seeded train/test split.
    Split(SplitArgs),
    /// Fit a model on the training rows of a split.
    Train(TrainArgs),
    /// Score a trained model on held-out rows.
    Eval(EvalArgs),
    /// Print the reduced Gröbner basis of one ideal.
    Gb(GbArgs),
    /// Euclidean distance between two encoded ideals.
    Distance(DistanceArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Upto,
}

impl From<ModeArg> for SamplingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Exact => SamplingMode::Exact,
            ModeArg::Upto => SamplingMode::UpTo,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Size,
    Maxdeg,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Self {
        match t {
            TargetArg::Size => Target::Size,
            TargetArg::Maxdeg => Target::MaxDegree,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Nn,
    Linreg,
    Mean,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetArg {
    Train,
    Test,
    All,
}

#[derive(Args, Debug, Clone)]
pub struct Workers {
    /// Worker threads.
    #[arg(long, env = "GBLEARN_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
}

impl Workers {
    pub fn count(&self) -> usize {
        self.workers
            .map(|w| w as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
    }
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct GenerateArgs {
    /// Number of variables.
    #[arg(long)]
    pub n: usize,
    /// Monomial degree (exact or upper bound, see --mode).
    #[arg(long)]
    pub d: u32,
    /// Generators per ideal.
    #[arg(long)]
    pub s: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    #[arg(long)]
    pub count: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct LabelArgs {
    #[arg(long)]
    pub ideals: PathBuf,
    /// Labels CSV, one row per ideal.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Where budget-exhausted rows are listed [default: <out>.quarantine.csv].
    #[arg(long)]
    pub quarantine: Option<PathBuf>,
    /// Also write the feature table computed from the same bases.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Abort an ideal after this many S-pairs and quarantine it.
    #[arg(long)]
    pub max_pairs: Option<usize>,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct FeaturesArgs {
    #[arg(long)]
    pub ideals: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    #[arg(long)]
    pub max_pairs: Option<usize>,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct EncodeArgs {
    #[arg(long)]
    pub ideals: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Sort generators by (leading, trailing) monomial before encoding.
    #[arg(long)]
    pub canonical: bool,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct SplitArgs {
    /// Any row-aligned file (ideals, labels or features) to count rows from.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    /// Ideals/encodings file or features CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub split: PathBuf,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = TargetArg::Size)]
    pub target: TargetArg,
    #[arg(long, value_enum, default_value_t = ModelArg::Nn)]
    pub model: ModelArg,
    /// Model file to write.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Per-epoch loss CSV (network only).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 128)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = 0.5)]
    pub dropout: f64,
    #[arg(long, default_value_t = 300)]
    pub filters: usize,
    /// Hidden dense layer widths.
    #[arg(long, value_delimiter = ',', default_value = "500,500")]
    pub dense: Vec<usize>,
    #[arg(long, default_value_t = 0.1)]
    pub validation_fraction: f64,
    /// Feed raw values to the network (no 1/d scaling or standardization).
    #[arg(long)]
    pub no_normalize: bool,
    /// Suppress per-epoch progress on stderr.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value_t = SetArg::Test)]
    pub set: SetArg,
    /// CSV report of the scores.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct GbArgs {
    #[arg(long)]
    pub ideals: PathBuf,
    /// Zero-based row.
    #[arg(long, default_value_t = 0)]
    pub row: usize,
    #[arg(long)]
    pub max_pairs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
#[command(args_override_self = true)]
pub struct DistanceArgs {
    #[arg(long)]
    pub ideals: PathBuf,
    #[arg(long)]
    pub i: usize,
    #[arg(long)]
    pub j: usize,
}
