use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fracleg", version, about = "Legendre expansions of singular functions and their error bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Output file, or a directory (existing, or given with a trailing slash)
    /// to receive the default file names. Standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// More log output on stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Legendre coefficients û_0..û_N of a model function.
    Expand(ExpandArgs),
    /// A-priori error bound as a function of the degree.
    Bounds(BoundsArgs),
    /// Truncation errors at doubling degrees with observed orders.
    Convergence(ConvergenceArgs),
    /// |û_n| at doubling n with observed decay orders.
    Decay(DecayArgs),
    /// Pointwise errors of the |x| expansion against the bounds at 0 and ±1.
    Tightness(TightnessArgs),
    /// Data behind the Legendre-polynomial and |x| tightness figures.
    Figures(FiguresArgs),
    /// Runs the invariant suite; exits with status 3 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    /// |x|^mu, mu > 0
    AbsPower,
    /// |x|
    AbsX,
    /// (x - theta)_+^mu, -1 < theta < 1, mu > -1
    InteriorPlusPower,
    /// (1 + x)^mu g(x), mu > -1
    EndpointPower,
    /// g(x) alone
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModulatorArg {
    One,
    Sin,
    Cos,
    Exp,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Model function.
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,

    /// Exponent of the singularity; a comma list builds one block per value
    /// where the subcommand allows it.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Vec<f64>,

    /// Location of the interior singularity for interior-plus-power.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta: f64,

    /// Smooth factor g of endpoint-power and smooth.
    #[arg(long, value_enum, default_value_t = ModulatorArg::One)]
    pub modulator: ModulatorArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Closed forms where available, quadrature below their threshold.
    Closed,
    /// Adaptive quadrature for every coefficient.
    Quadrature,
}

#[derive(Debug, Args)]
pub struct ExpandArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Highest degree N.
    #[arg(long)]
    pub degree: usize,

    #[arg(long, value_enum, default_value_t = StrategyArg::Closed)]
    pub strategy: StrategyArg,

    /// Relative tolerance of the quadrature engine.
    #[arg(long, default_value_t = fracleg::legexp::EXPAND_TOL)]
    pub quad_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundKindArg {
    /// Maximum-norm error, interior singularity.
    LinfInterior,
    /// (1-x²)^{1/4}-weighted maximum-norm error, interior singularity.
    WeightedLinfInterior,
    /// L² error, interior singularity.
    L2Interior,
    /// Maximum-norm error, singularity at x = -1.
    LinfEndpoint,
    /// L² error, singularity at x = -1.
    L2Endpoint,
    /// Error of the |x| expansion at x = 0.
    AbsxZero,
    /// Error of the |x| expansion at x = ±1.
    AbsxPm1,
    /// Size of the coefficient û_n.
    CoeffDecay,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub kind: BoundKindArg,

    /// Degrees N (comma list).
    #[arg(long, visible_alias = "n", value_delimiter = ',', required = true)]
    pub degree: Vec<usize>,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Extra derivatives m of the Caputo derivative for the endpoint bounds.
    #[arg(long, default_value_t = 0)]
    pub m: u32,

    /// Use this seminorm instead of computing it from the model.
    #[arg(long)]
    pub seminorm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum NormArg {
    Linf,
    Wlinf,
    L2,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Doubling degrees N (comma list).
    #[arg(long = "n", visible_alias = "degree", value_delimiter = ',', required = true)]
    pub degrees: Vec<usize>,

    /// The two norms to tabulate: linf with wlinf, or linf with l2. Defaults
    /// to linf,wlinf for interior singularities and linf,l2 at x = -1.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub norms: Vec<NormArg>,
}

#[derive(Debug, Args)]
pub struct DecayArgs {
    #[command(flatten)]
    pub model: ModelArgs,

    /// Doubling indices n (comma list).
    #[arg(long = "n", visible_alias = "degree", value_delimiter = ',', required = true)]
    pub degrees: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct TightnessArgs {
    /// Degrees N > 2 (comma list).
    #[arg(long = "n", visible_alias = "degree", value_delimiter = ',', default_value = "4,8,16,32,64,128")]
    pub degrees: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Degrees of the Legendre-polynomial curves.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub poly_degree: Vec<usize>,

    /// Degrees N > 2 of the |x| error profiles.
    #[arg(long = "n", visible_alias = "degree", value_delimiter = ',', default_value = "4,8,16,32,64,128")]
    pub degrees: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only the named checks (repeatable); see --list.
    #[arg(long = "check")]
    pub checks: Vec<String>,

    /// Print the check names and exit.
    #[arg(long)]
    pub list: bool,
}
