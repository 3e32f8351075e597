use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operand shapes do not agree.
    DimensionMismatch {
        /// Which operation rejected the operands.
        op: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A matrix or vector with a zero dimension was requested.
    EmptyShape,
    /// Backing storage does not match the declared shape.
    BadLength { expected: usize, found: usize },
    /// A NaN or infinite entry was supplied on construction.
    NonFinite { index: usize },
    /// LU elimination met a pivot below the singularity threshold.
    SingularMatrix { pivot: usize },
    /// A power was applied outside the real domain of the exponent.
    DomainError { index: usize, value: f64, exponent: f64 },
    /// An iterative method ran out of its iteration budget.
    NoConvergence { iterations: usize },
    /// An inner linear iteration diverged or ran out of sweeps.
    InnerNoConvergence { sweeps: usize, residual: f64 },
    /// The solver does not support this system layout.
    UnsupportedSystem(&'static str),
    /// A term or problem description violates its invariants.
    InvalidSpec(&'static str),
    /// The norm used to normalize an estimate is (numerically) zero.
    DegenerateNormalization,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { op, expected, found } => write!(
                f,
                "dimension mismatch in {op}: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Self::EmptyShape => f.write_str("matrices and vectors must have positive dimensions"),
            Self::BadLength { expected, found } => {
                write!(f, "storage length {found} does not match shape ({expected} entries)")
            }
            Self::NonFinite { index } => write!(f, "non-finite entry at flat index {index}"),
            Self::SingularMatrix { pivot } => write!(f, "matrix is singular at pivot {pivot}"),
            Self::DomainError { index, value, exponent } => write!(
                f,
                "entry {index} = {value:e} is outside the domain of exponent {exponent}"
            ),
            Self::NoConvergence { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            Self::InnerNoConvergence { sweeps, residual } => write!(
                f,
                "inner linear iteration failed after {sweeps} sweeps (residual {residual:e})"
            ),
            Self::UnsupportedSystem(why) => write!(f, "unsupported system: {why}"),
            Self::InvalidSpec(why) => write!(f, "invalid specification: {why}"),
            Self::DegenerateNormalization => {
                f.write_str("normalizing vector has (numerically) zero norm")
            }
        }
    }
}

impl core::error::Error for Error {}
