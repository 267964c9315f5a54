use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid read matrix: {0}")]
    InvalidReadMatrix(String),

    #[error("invalid factors: {0}")]
    InvalidFactors(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected:?}, got {got:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("index {index} out of range (< {bound})")]
    IndexOutOfRange { index: usize, bound: usize },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Armijo line search failed after {backtracks} backtracks")]
    LineSearchFailure { backtracks: usize },

    #[error("inadmissible start: f(X0) = {f0} is not below |Omega| = {omega_count}")]
    InadmissibleStart { f0: f64, omega_count: usize },

    #[error("{axis} {index} has no observations")]
    EmptyRowOrColumn { axis: &'static str, index: usize },

    #[error("degenerate alternating update: denominator {denominator:e} at {axis} {index}")]
    DegenerateUpdate {
        axis: &'static str,
        index: usize,
        denominator: f64,
    },

    #[error("reference matrix has zero norm")]
    ZeroTruth,

    #[error("no entries observed after {attempts} attempts")]
    EmptyObservation { attempts: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
