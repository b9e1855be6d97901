use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numeric kernels and the algebraic constructions.
#[derive(Debug, Clone, Error)]
pub enum SocleError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigenvalue iteration did not converge for a {0}x{0} matrix")]
    NoConvergence(usize),

    #[error("resolvent is singular on the contour at alpha = {0}")]
    ContourHitsSpectrum(Complex64),

    #[error("matrix is numerically singular")]
    Singular,

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not a projection (idempotency residual {0:.3e})")]
    NotAProjection(f64),

    #[error("{0} is not a nonzero point of the spectrum")]
    BadSpectralValue(Complex64),

    #[error("rank sampling failed: sampled rank {sampled}, direct rank {direct}")]
    RankSamplingFailed { sampled: usize, direct: usize },

    #[error("structure-constant presentation needs a Wedderburn decomposition first")]
    NeedsDecomposition,

    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),

    #[error("element is not a sum of commutators; per-ideal traces {0:?}")]
    NotInCommutatorSpace(Vec<Complex64>),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl SocleError {
    /// True for failures caused by the numerics (non-convergence, failed
    /// certificates) rather than by bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            SocleError::NoConvergence(_)
                | SocleError::ContourHitsSpectrum(_)
                | SocleError::Singular
                | SocleError::RankSamplingFailed { .. }
                | SocleError::DecompositionFailed(_)
                | SocleError::Numeric(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SocleError>;
