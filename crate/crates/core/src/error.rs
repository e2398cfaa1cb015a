use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("circulant embedding failed: most negative eigenvalue {min_eigenvalue:e} exceeds tolerance {tolerance:e}")]
    Embedding { min_eigenvalue: f64, tolerance: f64 },
    #[error("horizon too short: {0}")]
    HorizonTooShort(String),
    #[error("grid too coarse: spacing {spacing} exceeds {limit} (a quarter of the excursion scale at u = {u})")]
    GridTooCoarse { spacing: f64, limit: f64, u: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("matrix factorization failed: {0}")]
    Factorization(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

impl Error {
    /// Whether the failure is numerical (as opposed to bad user input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Embedding { .. }
                | Error::DegenerateFit(_)
                | Error::NoRoot(_)
                | Error::Factorization(_)
                | Error::Quadrature(_)
        )
    }
}
