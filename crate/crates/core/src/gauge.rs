//! Gauge operations on factor pairs: applying nonsingular transforms without
//! changing the product, canonicalizing to the unique constrained
//! representative, whitening V-only embeddings, and the symmetric-corpus ties.
//!
//! Every transformed pair leaves `U * V` unchanged; that invariant is what
//! makes all of these maps move within one solution set rather than between
//! problems.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{
    sym_eig_desc, sym_inv_sqrt, sym_sqrt, Matrix, Transform, TransformKind, SINGULARITY_TOL,
};

/// Relative gap under which two adjacent spectrum values count as tied.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Magnitude under which a leading column entry is treated as zero in the
/// sign-fixing step.
pub const SIGN_TOL: f64 = 1e-10;

/// A context matrix `U` (n x d) and embedding matrix `V` (d x p) whose
/// product `U V` is the gauge-invariant object.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub u: Matrix,
    pub v: Matrix,
}

impl FactorPair {
    pub fn new(u: Matrix, v: Matrix) -> Result<Self> {
        if u.cols() != v.rows() {
            return Err(Error::ShapeMismatch(format!(
                "inner dimensions differ: U is {}x{}, V is {}x{}",
                u.rows(),
                u.cols(),
                v.rows(),
                v.cols()
            )));
        }
        let d = u.cols();
        if d > u.rows() || d > v.cols() {
            return Err(Error::ShapeMismatch(format!(
                "inner dimension {d} exceeds min(n, p) = {}",
                u.rows().min(v.cols())
            )));
        }
        Ok(Self { u, v })
    }

    /// Shared inner dimension d.
    pub fn dim(&self) -> usize {
        self.u.cols()
    }

    /// The gauge-invariant product `U V`.
    pub fn product(&self) -> Result<Matrix> {
        self.u.matmul(&self.v)
    }
}

/// Replaces `(U, V)` by `(U C^{-1}, C V)`. The product is unchanged, so the
/// result is another member of the same solution set.
pub fn apply_transform(c: &Transform, pair: &FactorPair) -> Result<FactorPair> {
    if c.dim() != pair.dim() {
        return Err(Error::ShapeMismatch(format!(
            "transform is {0}x{0}, pair has inner dimension {1}",
            c.dim(),
            pair.dim()
        )));
    }
    let cm = c.matrix();
    // U C^{-1} = (C^{-T} U^T)^T, via one solve against C^T.
    let u_new = cm
        .transpose()
        .solve(&pair.u.transpose())
        .map_err(|e| match e {
            Error::SingularInput { .. } => Error::SingularTransform,
            other => other,
        })?
        .transpose();
    let v_new = cm.matmul(&pair.v)?;
    FactorPair::new(u_new, v_new)
}

/// The canonical representative of a pair's solution set: `V V^T = I_d`,
/// `U^T U` diagonal with non-increasing entries, and a positive first
/// nonzero entry in every column of `U`.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalPair {
    #[serde(skip)]
    pub pair: FactorPair,
    /// Diagonal of `U'^T U'`, non-increasing. These are the generalized
    /// eigenvalues of the pencil `(U^T U, (V V^T)^{-1})` and are invariant
    /// across the solution set.
    pub spectrum: Vec<f64>,
    /// Indices `i` where `spectrum[i]` and `spectrum[i+1]` differ by less
    /// than `1e-8` relative. A nonempty list means the canonical form is not
    /// unique and downstream comparisons should not rely on it.
    pub degenerate_pairs: Vec<usize>,
    /// Columns of `U` whose entries were all below the sign tolerance, left
    /// with their sign unfixed.
    pub unsigned_columns: Vec<usize>,
}

impl CanonicalPair {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate_pairs.is_empty()
    }
}

fn require_full_row_rank(v: &Matrix) -> Result<Matrix> {
    let w = v.matmul(&v.transpose())?;
    // Eigenvalues of V V^T are squared singular values of V.
    let (_, lambda) = sym_eig_desc(&w)?;
    let eigs = lambda.diagonal();
    let max = eigs[0];
    let min = eigs[eigs.len() - 1];
    if max <= 0.0 || min <= SINGULARITY_TOL * max {
        return Err(Error::RankDeficientV {
            ratio: if max > 0.0 { min / max } else { 0.0 },
        });
    }
    Ok(w)
}

/// Canonicalizes a pair to the unique representative described above.
///
/// Construction: with `W = V V^T`, eigendecompose
/// `S = W^{1/2} (U^T U) W^{1/2} = E Lambda E^T` and apply `C = E^T W^{-1/2}`.
/// Then `V' V'^T = I` and `U'^T U' = Lambda`; a final sign pass pins the
/// residual signed-permutation freedom whenever the spectrum is simple.
pub fn canonicalize(pair: &FactorPair) -> Result<CanonicalPair> {
    let w = require_full_row_rank(&pair.v)?;
    let utu = pair.u.transpose().matmul(&pair.u)?;
    if utu.max_abs() == 0.0 {
        return Err(Error::InvalidArgument(
            "U is identically zero; canonical form undefined".into(),
        ));
    }
    let w_sqrt = sym_sqrt(&w)?;
    let w_inv_sqrt = sym_inv_sqrt(&w)?;
    let s = w_sqrt.matmul(&utu)?.matmul(&w_sqrt)?.symmetrized();
    let (e, lambda) = sym_eig_desc(&s)?;
    let c = e.transpose().matmul(&w_inv_sqrt)?;

    let c_transform = Transform::new(c, TransformKind::General)?;
    let mut canonical = apply_transform(&c_transform, pair)?;

    // Pin column signs: first entry of each U column above the tolerance
    // must be positive; V rows flip in step so the product is untouched.
    let d = canonical.dim();
    let mut unsigned_columns = Vec::new();
    for j in 0..d {
        let mut sign = 0.0_f64;
        for i in 0..canonical.u.rows() {
            let v = canonical.u.get(i, j);
            if v.abs() > SIGN_TOL {
                sign = v.signum();
                break;
            }
        }
        if sign == 0.0 {
            unsigned_columns.push(j);
        } else if sign < 0.0 {
            for i in 0..canonical.u.rows() {
                canonical.u.set(i, j, -canonical.u.get(i, j));
            }
            for k in 0..canonical.v.cols() {
                canonical.v.set(j, k, -canonical.v.get(j, k));
            }
        }
    }

    let spectrum = lambda.diagonal();
    let mut degenerate_pairs = Vec::new();
    for i in 0..spectrum.len().saturating_sub(1) {
        let scale = spectrum[i].abs().max(spectrum[i + 1].abs());
        if scale == 0.0 || (spectrum[i] - spectrum[i + 1]).abs() < DEGENERACY_TOL * scale {
            degenerate_pairs.push(i);
        }
    }

    Ok(CanonicalPair {
        pair: canonical,
        spectrum,
        degenerate_pairs,
        unsigned_columns,
    })
}

/// Imposes the constraint `V V^T = I_d` using `V` alone:
/// returns `(V V^T)^{-1/2} V`, which lies in the orthogonal orbit of every
/// other whitening of `V`.
pub fn whiten(v: &Matrix) -> Result<Matrix> {
    let w = require_full_row_rank(v)?;
    sym_inv_sqrt(&w)?.matmul(v)
}

/// Result of resolving the symmetric-corpus tie `C^{-T} U^T = C V`.
#[derive(Debug, Clone)]
pub struct SymmetricTie {
    /// The tied embedding `C V`.
    pub v_tied: Matrix,
    /// The transform realizing the tie.
    pub c: Transform,
    /// `||C^{-T} U^T - C V||_F / ||U^T||_F`; near zero when an exact
    /// symmetric-positive-definite solution exists.
    pub residual: f64,
}

/// Finds the gauge in which contexts and words coincide: solves
/// `C^{-T} U^T = C V` by setting `M = U^T V^T (V V^T)^{-1}` (the least-squares
/// solution of `M V = U^T`), symmetrizing, and taking `C = M^{1/2}`.
///
/// Requires the symmetrized `M` to be positive definite; failure means the
/// pair is not gauge-equivalent to a tied solution, and the error carries the
/// offending eigenvalues.
pub fn symmetric_tie(pair: &FactorPair) -> Result<SymmetricTie> {
    if pair.u.rows() != pair.v.cols() {
        return Err(Error::ShapeMismatch(format!(
            "symmetric tie needs n = p, got n = {}, p = {}",
            pair.u.rows(),
            pair.v.cols()
        )));
    }
    let w = require_full_row_rank(&pair.v)?;
    let w_inv = w.inverse()?;
    let m = pair
        .u
        .transpose()
        .matmul(&pair.v.transpose())?
        .matmul(&w_inv)?
        .symmetrized();
    let c = sym_sqrt(&m)?;
    let v_tied = c.matmul(&pair.v)?;
    // Residual of the tie equation, relative to U.
    let c_inv_t = c.inverse()?.transpose();
    let lhs = c_inv_t.matmul(&pair.u.transpose())?;
    let u_norm = pair.u.frobenius_norm();
    let residual = if u_norm > 0.0 {
        lhs.sub(&v_tied)?.frobenius_norm() / u_norm
    } else {
        0.0
    };
    let c = Transform::new(c, TransformKind::General)?;
    Ok(SymmetricTie { v_tied, c, residual })
}

/// The additive tie `U^T + V` used when contexts and words share an
/// interpretation; requires `n = p`.
pub fn sum_tie(pair: &FactorPair) -> Result<Matrix> {
    if pair.u.rows() != pair.v.cols() {
        return Err(Error::ShapeMismatch(format!(
            "sum tie needs n = p, got n = {}, p = {}",
            pair.u.rows(),
            pair.v.cols()
        )));
    }
    pair.u.transpose().add(&pair.v)
}

/// If `a = Q b` for some orthogonal `Q`, returns `Q`. Both inputs must have
/// orthonormal rows (`M M^T = I`), as whitened or canonical `V` factors do;
/// then the candidate is simply `a b^T`.
pub fn orthogonal_witness(a: &Matrix, b: &Matrix, tol: f64) -> Result<Option<Matrix>> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let q = a.matmul(&b.transpose())?;
    let d = q.rows();
    if q.transpose().matmul(&q)?.max_abs_diff(&Matrix::identity(d)) >= tol {
        return Ok(None);
    }
    if q.matmul(b)?.max_abs_diff(a) >= tol {
        return Ok(None);
    }
    Ok(Some(q))
}
