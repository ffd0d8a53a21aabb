use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fdakit", version, about = "Functional data analysis on the command line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic sample
    Simulate(SimulateArgs),
    /// Smooth every curve with a linear smoother
    Smooth(SmoothArgs),
    /// Register (align) the curves
    Register(RegisterArgs),
    /// Functional principal components
    Fpca(FpcaArgs),
    /// Select grid points that discriminate two or more classes
    Select(SelectArgs),
    /// Summary statistics
    Stats(StatsArgs),
    /// Functional depth of every curve
    Depth(DepthArgs),
    /// Outlier detection
    Outliers(OutliersArgs),
    /// Static SVG plots
    Plot(PlotArgs),
}

impl Command {
    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Simulate(a) => a.out.as_ref(),
            Command::Smooth(a) => a.io.out.as_ref(),
            Command::Register(a) => a.io.out.as_ref(),
            Command::Fpca(a) => a.io.out.as_ref(),
            Command::Select(a) => a.io.out.as_ref(),
            Command::Stats(a) => a.io.out.as_ref(),
            Command::Depth(a) => a.io.out.as_ref(),
            Command::Outliers(a) => a.io.out.as_ref(),
            Command::Plot(a) => a.io.out.as_ref(),
        }
    }
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Input dataset: CSV, or JSON when the extension is .json
    #[arg(short, long)]
    pub input: PathBuf,
    /// Write the result to this file instead of stdout
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Generator {
    Gp,
    Multimodal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Brownian,
    Exponential,
    Gaussian,
    Matern,
    Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(value_enum)]
    pub generator: Generator,
    /// Number of curves
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Number of equally spaced grid points on [0, 1]
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = KernelKind::Brownian)]
    pub kernel: KernelKind,
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,
    #[arg(long, default_value_t = 0.2)]
    pub length_scale: f64,
    /// Matérn smoothness: 0.5, 1.5 or 2.5
    #[arg(long, default_value_t = 1.5)]
    pub nu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub bias: f64,
    #[arg(long, default_value_t = 1.0)]
    pub slope: f64,
    #[arg(long, default_value_t = 2)]
    pub degree: u32,
    /// Constant mean of the process
    #[arg(long, default_value_t = 0.0)]
    pub mean: f64,
    /// Number of bumps per multimodal curve
    #[arg(long, default_value_t = 2)]
    pub modes: usize,
    #[arg(long, default_value_t = 0.0)]
    pub noise_sd: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SmoothMethod {
    Nw,
    Llr,
    Knn,
    Basis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Search {
    Loo,
    Gcv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Penalty {
    Default,
    Akaike,
    Shibata,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelName {
    Gaussian,
    Uniform,
    Epanechnikov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisName {
    Bspline,
    Fourier,
    Monomial,
}

#[derive(Debug, Args)]
pub struct SmoothArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum)]
    pub method: SmoothMethod,
    /// Bandwidth, neighbour count or penalty weight; several values with --search
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub param: Vec<f64>,
    /// Pick the best of the --param values by this criterion
    #[arg(long, value_enum)]
    pub search: Option<Search>,
    #[arg(long, value_enum, default_value_t = Penalty::Default)]
    pub penalty: Penalty,
    #[arg(long, value_enum, default_value_t = KernelName::Gaussian)]
    pub kernel: KernelName,
    #[arg(long, value_enum, default_value_t = BasisName::Bspline)]
    pub basis: BasisName,
    #[arg(long, default_value_t = 10)]
    pub n_basis: usize,
    /// Order of the derivative penalized by the basis smoother
    #[arg(long, default_value_t = 2)]
    pub derivative: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegisterMethod {
    Shift,
    LandmarkShift,
    LandmarkElastic,
    Elastic,
}

#[derive(Debug, Args)]
pub struct RegisterArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum)]
    pub method: RegisterMethod,
    /// Landmarks, curves separated by ';' and landmarks within a curve by ','
    #[arg(long, value_parser = parse_landmarks, allow_hyphen_values = true)]
    pub landmarks: Option<Landmarks>,
    /// Target landmark positions (default: their mean)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub target: Option<Vec<f64>>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Landmarks(pub Vec<Vec<f64>>);

fn parse_landmarks(text: &str) -> Result<Landmarks, String> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|_| format!("{v:?} is not a number")))
                .collect()
        })
        .collect::<Result<Vec<Vec<f64>>, String>>()
        .map(Landmarks)
}

#[derive(Debug, Args)]
pub struct FpcaArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long)]
    pub components: usize,
    /// Roughness penalty on the second derivative of the components
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectMethod {
    Mrmr,
    Rkhs,
    Mh,
    Rmh,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CovarianceChoice {
    Pooled,
    Marginal,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum)]
    pub method: SelectMethod,
    /// Class label of every curve, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    pub labels: Vec<usize>,
    /// Number of points to select (all maxima for mh; up to the grid size for rmh)
    #[arg(long)]
    pub features: Option<usize>,
    /// Maxima-hunting neighbourhood half-width in grid indices
    #[arg(long, default_value_t = fdakit::dimred::DEFAULT_MH_WINDOW)]
    pub window: usize,
    /// Recursive maxima hunting stops below this dependence
    #[arg(long, default_value_t = fdakit::dimred::DEFAULT_RMH_THRESHOLD)]
    pub threshold: f64,
    #[arg(long, value_enum, default_value_t = CovarianceChoice::Pooled)]
    pub covariance: CovarianceChoice,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Statistic {
    Mean,
    Var,
    Cov,
    Median,
    GeometricMedian,
    TrimmedMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DepthName {
    Fm,
    Bd,
    Mbd,
}

impl From<DepthName> for fdakit::exploratory::DepthMethod {
    fn from(d: DepthName) -> Self {
        match d {
            DepthName::Fm => Self::FraimanMuniz,
            DepthName::Bd => Self::BandDepth,
            DepthName::Mbd => Self::ModifiedBandDepth,
        }
    }
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(value_enum)]
    pub statistic: Statistic,
    #[command(flatten)]
    pub io: IoArgs,
    /// Depth used by median and trimmed-mean
    #[arg(long, value_enum, default_value_t = DepthName::Mbd)]
    pub depth: DepthName,
    /// Fraction of least deep curves dropped by trimmed-mean
    #[arg(long, default_value_t = 0.1)]
    pub proportion: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct DepthArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum, default_value_t = DepthName::Mbd)]
    pub method: DepthName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutlierMethod {
    Boxplot,
    Msplot,
    Outliergram,
}

#[derive(Debug, Args)]
pub struct OutliersArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, value_enum)]
    pub method: OutlierMethod,
    /// Boxplot fence factor
    #[arg(long, default_value_t = 1.5)]
    pub factor: f64,
    /// Extra boxplot envelopes holding these fractions of the deepest curves
    #[arg(long, value_delimiter = ',')]
    pub prob: Vec<f64>,
    #[arg(long, value_enum, default_value_t = DepthName::Mbd)]
    pub depth: DepthName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    Curves,
    Boxplot,
    Msplot,
    Outliergram,
    FpcaPerturbation,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(value_enum)]
    pub kind: PlotKind,
    #[command(flatten)]
    pub io: IoArgs,
    #[arg(long, default_value_t = 1.5)]
    pub factor: f64,
    #[arg(long, value_enum, default_value_t = DepthName::Mbd)]
    pub depth: DepthName,
    /// Component shown by fpca-perturbation (0-based)
    #[arg(long, default_value_t = 0)]
    pub component: usize,
    /// Multiple of the component's standard deviation added to the mean
    #[arg(long, default_value_t = 2.0)]
    pub multiple: f64,
    #[arg(long, default_value_t = 640)]
    pub width: u32,
    #[arg(long, default_value_t = 400)]
    pub height: u32,
}
