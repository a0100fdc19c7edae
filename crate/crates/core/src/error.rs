use thiserror::Error;

/// Errors raised by the tensor algebra, constitutive laws and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular tensor (det = {det:e})")]
    SingularTensor { det: f64 },

    #[error("non-positive determinant (det = {det:e})")]
    NonPositiveDeterminant { det: f64 },

    #[error("non-positive stretch ({what} = {value:e})")]
    NonPositiveStretch { what: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge on [{a}, {b}] (last change {change:e})")]
    QuadratureFailure { a: f64, b: f64, change: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e}): {context}")]
    NoConvergence {
        context: String,
        iterations: usize,
        residual: f64,
        /// Last iterate, in the caller's natural units.
        last: Vec<f64>,
    },
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical trouble.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
