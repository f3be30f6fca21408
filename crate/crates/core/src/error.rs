use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// A call argument (count, bounds, lag) is malformed.
    #[error("argument error: {0}")]
    Argument(String),

    /// Inputs of incompatible shape or kind were combined, e.g. a Lamperti
    /// transform requested on a grid that is not geometric.
    #[error("interface error: {0}")]
    Interface(String),

    /// The integration-by-parts covariance or pathwise integral is not
    /// available for the requested Hurst regime.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A kernel with a diagonal singularity was evaluated on the diagonal.
    #[error("singular point: kernel evaluated at x = y = {0}")]
    SingularPoint(f64),

    /// Cholesky factorization failed even at the largest jitter level.
    #[error("matrix is not positive definite at pivot {pivot} (jitter {jitter:e})")]
    Factorization { pivot: usize, jitter: f64 },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// A log-linear fit window contains non-positive values.
    #[error("fit window error: R(t) <= 0 first at t = {first_crossing}")]
    Window { first_crossing: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error comes from a numerical procedure (factorization,
    /// quadrature, fitting) rather than from bad input or I/O.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Factorization { .. } | Error::Accuracy { .. } | Error::Window { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
