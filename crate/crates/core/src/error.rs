use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("separation undefined: at least two centers are required")]
    SeparationUndefined,

    #[error("empty center set")]
    EmptyCenters,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid generator: {0}")]
    InvalidGenerator(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {index} lies outside the domain")]
    OutsideDomain { index: usize },

    #[error("centers {first} and {second} are closer than the duplicate tolerance")]
    DuplicateCenters { first: usize, second: usize },

    #[error("no center lies in the support region")]
    EmptySupport,

    #[error("centers are not unisolvent for polynomials of degree {degree} (rank {rank} of {required})")]
    NotUnisolvent {
        degree: usize,
        rank: usize,
        required: usize,
    },

    #[error("ill-conditioned interpolation system: condition estimate {estimate:.3e}")]
    IllConditioned { estimate: f64 },

    #[error("factorization failed: zero pivot at column {column}")]
    Factorization { column: usize },

    #[error("interpolation residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("side conditions violated by {violation:.3e}")]
    SideConditions { violation: f64 },

    #[error("singular point: derivative of order {order} undefined at a kernel center")]
    SingularPoint { order: usize },

    #[error("no feasible density radius up to {limit:.6e} at point {index} ({point:?})")]
    NoFeasibleRadius { index: usize, point: Vec<f64>, limit: f64 },

    #[error("density value missing at grid point {index}")]
    MissingRho { index: usize },

    #[error("too few usable decay samples: {got} (need at least {need})")]
    TooFewSamples { got: usize, need: usize },

    #[error("tail exhausted: denominator seminorm {value:.3e} below 1e-14")]
    TailExhausted { value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error in {source_name} line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Numerical failures: ill-conditioning, lack of unisolvency and their relatives.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotUnisolvent { .. }
                | Error::IllConditioned { .. }
                | Error::Factorization { .. }
                | Error::Residual { .. }
                | Error::SideConditions { .. }
                | Error::SingularPoint { .. }
                | Error::NoFeasibleRadius { .. }
                | Error::TooFewSamples { .. }
                | Error::TailExhausted { .. }
                | Error::DuplicateCenters { .. }
                | Error::SeparationUndefined
        )
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
