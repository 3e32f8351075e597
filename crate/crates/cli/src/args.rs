use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "polyjac", version, about = "Polynomial systems, analytical Jacobians and Newton-type solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the homogeneous-function identity on random or given terms
    Verify(VerifyArgs),
    /// Solve a bundled problem or a system file
    Solve(SolveArgs),
    /// Compare analytical and finite-difference Jacobians
    Jacobian(JacobianArgs),
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Bundled problem: burgers, fractional, duffing or mixed
    #[arg(long)]
    pub problem: Option<String>,
    /// System JSON file
    #[arg(long, value_name = "PATH")]
    pub system: Option<PathBuf>,
    /// Config JSON file; flags override its values
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Interior grid points (verify accepts a comma list of dimensions)
    #[arg(long, value_delimiter = ',', value_name = "N[,N...]")]
    pub n: Vec<usize>,
    /// Problem parameter, e.g. nu=0.5
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Also write the assembled system as JSON
    #[arg(long, value_name = "PATH")]
    pub export_system: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Report file
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Report format; defaults to the --out extension, else csv
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Term orders m = 1 + s for the random suite
    #[arg(long, value_delimiter = ',', value_name = "M[,M...]")]
    pub orders: Vec<f64>,
    /// Random points (and random terms) per order and dimension
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// RNG seed; drawn from the clock and printed when omitted
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest acceptable normalized residual
    #[arg(long, default_value_t = 1e-10)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Newton,
    NewtonNofe,
    LinearLike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InnerArg {
    Lu,
    Jacobi,
    Gs,
    Sor,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Inner solver for linear-like
    #[arg(long, value_enum)]
    pub inner: Option<InnerArg>,
    /// SOR relaxation in (0, 2)
    #[arg(long)]
    pub omega: Option<f64>,
    /// Residual tolerance (max-norm)
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// With newton-nofe: also run Newton and report per-iterate deviation
    #[arg(long)]
    pub compare: bool,
    /// Report 0 ms for every iteration, for byte-stable reports
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FdArg {
    Forward,
    Central,
}

#[derive(Debug, Args)]
pub struct JacobianArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long, value_enum, default_value = "central")]
    pub fd: FdArg,
    /// Finite-difference steps in (0, 1)
    #[arg(long, value_delimiter = ',', value_name = "H[,H...]", allow_hyphen_values = true)]
    pub h: Vec<f64>,
    /// Print the instance analysis of the stiffness matrix
    #[arg(long)]
    pub report: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}
