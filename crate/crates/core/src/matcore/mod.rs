//! Dense matrix decompositions, matrix functions, and random transform
//! sampling that every other module builds on.
//!
//! All operations are pure functions of their inputs; values are immutable
//! after construction and safe to share across threads. The only mutable
//! state is the random generator, which callers own and pass in.

pub mod decomp;
pub mod matrix;
pub mod rng;
pub mod transform;

pub use decomp::{
    polar_orthogonal, singular_values, singularity_ratio, svd, svd_thin, sym_eig_desc,
    sym_inv_sqrt, sym_sqrt, Svd, SINGULARITY_TOL,
};
pub use matrix::Matrix;
pub use rng::SplitMix64;
pub use transform::{
    maximal_invariant, power_diag, qr_positive, same_orbit, sample_transform, Transform,
    TransformKind, ORTHOGONALITY_TOL,
};
