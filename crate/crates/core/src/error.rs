use thiserror::Error;

use crate::series::WeylEvaluation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coefficient lists must be non-empty")]
    EmptyCoefficients,
    #[error("off-diagonal coefficient a_{index} vanishes")]
    ZeroOffDiagonal { index: usize },
    #[error("a has {a} entries but b has {b}")]
    LengthMismatch { a: usize, b: usize },
    #[error("non-finite entry in {what}")]
    NonFiniteEntry { what: String },
    #[error("coefficient {what}_{index} requested but only {available} stored and no tail rule")]
    InsufficientCoefficients {
        what: &'static str,
        index: usize,
        available: usize,
    },
    #[error("matrix is not a complex symmetric tridiagonal block: {0}")]
    NotJacobi(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("truncations disagree by {disagreement:.3e} (tolerance {tol:.1e}); lambda is likely near the essential spectrum")]
    NoDecayDetected { disagreement: f64, tol: f64 },
    #[error("index {index} outside solution range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("solutions were computed at different spectral parameters")]
    MismatchedLambda,
    #[error("Wronskian vanishes: lambda is an eigenvalue of the finite block")]
    SingularWronskian,
    #[error("phi_0 vanishes: lambda is a pole of the Weyl function")]
    PoleAtLambda,

    #[error("singular values are repeated or zero ({0})")]
    DegenerateSpectrum(String),
    #[error("first component of Takagi vector {index} vanishes")]
    ZeroFirstComponent { index: usize },
    #[error("factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("z = 0 has no image under the Joukowski map")]
    ZeroArgument,
    #[error("quadrature changed by {change:.3e} under node doubling (tolerance {tol:.1e})")]
    QuadratureNotConverged { change: f64, tol: f64 },

    #[error("|z(lambda)| R = {z_times_r:.6} >= 1: lambda lies outside the convergence region")]
    OutsideRegionD { z_times_r: f64 },
    #[error("response vector too short: tail bound {:.3e} after {} terms", .partial.tail_bound, .partial.truncation_t)]
    HorizonTooShort { partial: Box<WeylEvaluation> },

    #[error("config: {0}")]
    Config(#[from] serde_json::Error),
}
