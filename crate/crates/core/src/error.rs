use thiserror::Error;

/// Errors raised by the discretization, solvers and sweep driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {0} lies outside the domain [0, 1]")]
    OutOfDomain(f64),

    #[error("basis index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("interface data is discontinuous: u0(gamma) = {left}, u1(gamma) = {right}")]
    DiscontinuousInput { left: f64, right: f64 },

    #[error("diffusion coefficient {value} at x = {x} is not positive")]
    CoefficientNotPositive { x: f64, value: f64 },

    #[error("source problem requested but no source term was supplied")]
    MissingSource,

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("eigensolver did not converge after {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("eigenfunction alignment is degenerate: |(u_h, u)| = {inner}")]
    DegenerateAlignment { inner: f64 },

    #[error("insufficient data for rate fit: {usable} usable records, need 3")]
    InsufficientData { usable: usize },

    #[error("eigenvalue matching failed: {0}")]
    EigenvalueMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("p = {p}, N = {n}, {method}: {source}")]
    Cell {
        p: usize,
        n: usize,
        method: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input rather than numerics.
    pub fn is_config(&self) -> bool {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) | Error::MissingSource => true,
            Error::Cell { source, .. } => source.is_config(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
