//! Word-embedding factorizations carry a gauge freedom: the training
//! objective sees the factors `U` and `V` only through their product, so any
//! nonsingular `C` maps a solution `(U, V)` to another solution
//! `(U C^{-1}, C V)`. Cosine-based task evaluation is invariant only under
//! the much smaller scaled-orthogonal subgroup, and the mismatch means task
//! scores depend on which member of the solution set a training run happened
//! to produce.
//!
//! This crate makes that structure executable:
//!
//! - [`matcore`]: dense decompositions (QR with positive diagonal, symmetric
//!   eigendecomposition, SVD), matrix square roots, and random transform
//!   sampling.
//! - [`lsa`]: document-term matrices and the truncated-SVD embedding model
//!   with its exponent-indexed family of equally optimal factor pairs.
//! - [`gauge`]: applying transforms to factor pairs, canonicalization to the
//!   unique constrained representative, whitening, and symmetric-corpus ties.
//! - [`eval`]: cosine similarity against human-scored word pairs with
//!   Spearman and Pearson scoring.
//! - [`explore`]: alpha sweeps along diagonal subgroups and random-transform
//!   score distributions.
//! - [`optimize`]: Nelder-Mead search over the diagonal slice, with k-fold
//!   cross-validation.

pub mod error;
pub mod eval;
pub mod explore;
pub mod gauge;
pub mod lsa;
pub mod matcore;
pub mod optimize;

pub use error::{Error, Result};
