use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {index} is zero")]
    ZeroCoordinate { index: usize },

    #[error("polynomial has degree zero")]
    DegenerateDegreeZero,

    #[error("polynomial is not monic")]
    NotMonic,

    #[error("polynomial has zero constant term")]
    ZeroConstantTerm,

    #[error("constant term must be +1 or -1 for a unimodular companion matrix")]
    NonUnitConstantTerm,

    #[error("degree {degree} exceeds the supported bound {max}")]
    DegreeTooLarge { degree: usize, max: usize },

    #[error("enclosure width {width:e} exceeds requested tolerance {tol:e}")]
    ToleranceNotReached { width: f64, tol: f64 },

    #[error("margin must be strictly positive, got {0}")]
    NonPositiveMargin(f64),

    #[error("spectrum does not have the expected shape: {0}")]
    SpectrumShapeMismatch(String),

    #[error("eigen-frame is numerically singular (condition estimate {0:e})")]
    IllConditionedFrame(f64),

    #[error("certification failed: {0}")]
    CertificationFailed(String),

    #[error("affine rank {rank} is below the ambient dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },

    #[error("hull membership failed: {0}")]
    MembershipFailure(String),

    #[error("point w = {re} + {im}i lies outside the strip")]
    OutsideStrip { re: f64, im: f64 },

    #[error("series hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("tail bound cannot reach {tol:e} within horizon {horizon}")]
    TailNotCertifiable { tol: f64, horizon: usize },

    #[error("aliasing suspected: sample densities disagree by {0:e}")]
    AliasingSuspected(f64),

    #[error("witness search failed: {0}")]
    SearchFailed(String),

    #[error("Laplace solve did not produce a finite solution")]
    NonConvergedSolve,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
