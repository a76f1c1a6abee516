//! Error type shared across the library.

use thiserror::Error;

/// Errors produced by matrix, factorization, and evaluation operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operand shapes are incompatible.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A matrix contained NaN or infinite entries.
    #[error("non-finite entries in {0}")]
    NonFiniteEntries(&'static str),

    /// Input is singular to the working tolerance.
    #[error("singular input: sigma_min/sigma_max = {ratio:.3e} below tolerance")]
    SingularInput { ratio: f64 },

    /// A gauge transform failed the nonsingularity check.
    #[error("singular transform")]
    SingularTransform,

    /// Requested factorization rank exceeds what the input supports.
    #[error("requested rank {requested} exceeds min(n, p) = {max}")]
    RankRequestTooLarge { requested: usize, max: usize },

    /// A symmetric matrix was expected to be positive definite.
    #[error("matrix is not positive definite; eigenvalues {eigenvalues:?}")]
    NotPositiveDefinite { eigenvalues: Vec<f64> },

    /// A diagonal operation met a zero or negative diagonal entry.
    #[error("diagonal entries must be strictly positive")]
    NonpositiveDiagonal,

    /// A diagonal matrix was expected.
    #[error("matrix is not diagonal")]
    NotDiagonal,

    /// The matrix does not satisfy the declared transform class.
    #[error("matrix does not satisfy transform kind `{kind}`: {detail}")]
    KindViolation { kind: &'static str, detail: String },

    /// No vocabulary word survived frequency filtering.
    #[error("empty vocabulary after filtering")]
    EmptyVocabulary,

    /// The trailing singular value is exactly zero, so the rank-d solution
    /// set is larger than a single GL(d) orbit and gauge analysis does not apply.
    #[error("degenerate spectrum: sigma_{rank} = 0")]
    DegenerateSpectrum { rank: usize },

    /// V does not have full row rank to tolerance.
    #[error("V is rank deficient: lambda_min/lambda_max = {ratio:.3e}")]
    RankDeficientV { ratio: f64 },

    /// A vector required to be nonzero had norm below tolerance.
    #[error("zero vector (norm below {0:.1e})")]
    ZeroVector(f64),

    /// Correlation input with fewer than two values or no variation.
    #[error("constant input: correlation undefined")]
    ConstantInput,

    /// Paired lists had different lengths.
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Too few resolvable word pairs to score.
    #[error("too few pairs: {usable} usable, need at least {needed}")]
    TooFewPairs { usable: usize, needed: usize },

    /// The objective was not finite at the initial simplex.
    #[error("objective not finite at initial simplex vertex {vertex}")]
    NonFiniteObjective { vertex: usize },

    /// Invalid fold count for cross-validation.
    #[error("bad k for {n} pairs: k = {k} (need 2 <= k <= n)")]
    BadK { k: usize, n: usize },

    /// Catch-all for invalid arguments to library entry points.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
