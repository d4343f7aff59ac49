use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Distribution or operation parameters outside their admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested expectation diverges for this distribution.
    #[error("infinite expected top order statistic: {0}")]
    InfiniteMean(String),

    /// Argument outside the domain of the operation (e.g. a point off the support).
    #[error("out of domain: {0}")]
    Domain(String),

    /// The distribution does not satisfy the Myerson regularity condition.
    #[error("distribution is not regular: {0}")]
    NotRegular(String),

    /// The requested estimator cannot produce a valid interval for these outcomes.
    #[error("estimator refused: {0}")]
    EstimatorRefused(String),

    #[error("quadrature did not converge: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("participation mismatch: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors rooted in the mathematics (divergent means, invalid
    /// parameters, non-regular distributions) rather than in I/O or input syntax.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InfiniteMean(_)
                | Error::Domain(_)
                | Error::NotRegular(_)
                | Error::Quadrature { .. }
        )
    }
}
