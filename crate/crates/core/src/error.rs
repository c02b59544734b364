use thiserror::Error;

use crate::residual::ResidualReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite entry in {0}")]
    NonFinite(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{what} is singular (sigma_min = {sigma_min:e}, threshold = {threshold:e})")]
    Singular {
        what: String,
        sigma_min: f64,
        threshold: f64,
    },

    #[error("SVD of a {rows}x{cols} matrix did not converge")]
    NonConvergence { rows: usize, cols: usize },

    #[error("basis is not orthonormal (Gram residual {0:e})")]
    NotOrthonormal(f64),

    #[error("U and V are not equivalent after extension: nullity(U) = {nullity_u}, nullity(V) = {nullity_v}")]
    Infeasible { nullity_u: usize, nullity_v: usize },

    #[error("verification failed: {0}")]
    Verification(Box<ResidualReport>),

    #[error("internal consistency violated: {0}")]
    Inconsistent(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("symbol (nearly) vanishes on the unit circle: min |f| = {min_modulus:e} <= {tol:e}")]
    SymbolVanishes { min_modulus: f64, tol: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The residual table of a failed verification, looking through stage tags.
    pub fn report(&self) -> Option<&ResidualReport> {
        match self {
            Error::Verification(r) => Some(r),
            Error::Stage { source, .. } => source.report(),
            _ => None,
        }
    }

    /// True for errors that mean "the claim does not hold" rather than "the
    /// input could not be processed".
    pub fn is_verification_failure(&self) -> bool {
        match self {
            Error::Verification(_) | Error::Infeasible { .. } | Error::Inconsistent(_) => true,
            Error::Singular { .. } | Error::SymbolVanishes { .. } => true,
            Error::Stage { source, .. } => source.is_verification_failure(),
            _ => false,
        }
    }
}
