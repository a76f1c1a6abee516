//! Gauge transforms: square nonsingular matrices tagged with the structural
//! class they belong to, plus sampling and the operations that expose the
//! orthogonal-orbit structure of GL(d).

use std::fmt;

use crate::error::{Error, Result};
use crate::matcore::decomp::{
    polar_orthogonal, qr_positive_matrices, singularity_ratio, SINGULARITY_TOL,
};
use crate::matcore::matrix::Matrix;
use crate::matcore::rng::SplitMix64;

/// Max deviation of `Q^T Q` from the identity accepted for the orthogonal class.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// Structural class of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    General,
    Orthogonal,
    UpperTriangular,
    Diagonal,
    ScaledIdentity,
}

impl TransformKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            TransformKind::General => "general",
            TransformKind::Orthogonal => "orthogonal",
            TransformKind::UpperTriangular => "upper_triangular",
            TransformKind::Diagonal => "diagonal",
            TransformKind::ScaledIdentity => "scaled_identity",
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A d x d nonsingular matrix together with its structural class.
///
/// Construction validates nonsingularity (smallest singular value above
/// `1e-12` times the largest) and the class invariants:
/// orthogonal means `||C^T C - I||_max < 1e-10`; upper-triangular means exact
/// zeros below the diagonal and strictly positive diagonal; diagonal means
/// exact zeros off the diagonal and strictly positive diagonal; scaled
/// identity means `c * I` with `c != 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    matrix: Matrix,
    kind: TransformKind,
}

impl Transform {
    pub fn new(matrix: Matrix, kind: TransformKind) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::ShapeMismatch(format!(
                "transform must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let ratio = singularity_ratio(&matrix);
        if ratio <= SINGULARITY_TOL {
            return Err(Error::SingularInput { ratio });
        }
        let d = matrix.rows();
        match kind {
            TransformKind::General => {}
            TransformKind::Orthogonal => {
                let gram = matrix.transpose().matmul(&matrix)?;
                let dev = gram.max_abs_diff(&Matrix::identity(d));
                if dev >= ORTHOGONALITY_TOL {
                    return Err(Error::KindViolation {
                        kind: "orthogonal",
                        detail: format!("||C^T C - I||_max = {dev:.3e}"),
                    });
                }
            }
            TransformKind::UpperTriangular => {
                for i in 0..d {
                    for j in 0..i {
                        if matrix.get(i, j) != 0.0 {
                            return Err(Error::KindViolation {
                                kind: "upper_triangular",
                                detail: format!("nonzero below diagonal at ({i}, {j})"),
                            });
                        }
                    }
                    if matrix.get(i, i) <= 0.0 {
                        return Err(Error::KindViolation {
                            kind: "upper_triangular",
                            detail: format!("diagonal entry {i} not positive"),
                        });
                    }
                }
            }
            TransformKind::Diagonal => {
                for i in 0..d {
                    for j in 0..d {
                        if i != j && matrix.get(i, j) != 0.0 {
                            return Err(Error::KindViolation {
                                kind: "diagonal",
                                detail: format!("nonzero off-diagonal at ({i}, {j})"),
                            });
                        }
                    }
                    if matrix.get(i, i) <= 0.0 {
                        return Err(Error::KindViolation {
                            kind: "diagonal",
                            detail: format!("diagonal entry {i} not positive"),
                        });
                    }
                }
            }
            TransformKind::ScaledIdentity => {
                let c = matrix.get(0, 0);
                if c == 0.0 {
                    return Err(Error::KindViolation {
                        kind: "scaled_identity",
                        detail: "scale is zero".into(),
                    });
                }
                for i in 0..d {
                    for j in 0..d {
                        let expect = if i == j { c } else { 0.0 };
                        if matrix.get(i, j) != expect {
                            return Err(Error::KindViolation {
                                kind: "scaled_identity",
                                detail: format!("entry ({i}, {j}) differs from c*I"),
                            });
                        }
                    }
                }
            }
        }
        Ok(Self { matrix, kind })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            matrix: Matrix::identity(d),
            kind: TransformKind::ScaledIdentity,
        }
    }

    pub fn scaled_identity(d: usize, c: f64) -> Result<Self> {
        Self::new(Matrix::identity(d).scale(c), TransformKind::ScaledIdentity)
    }

    pub fn from_diagonal(entries: &[f64]) -> Result<Self> {
        Self::new(Matrix::from_diag(entries), TransformKind::Diagonal)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// QR decomposition with positive diagonal: `C = Q R`, unique for
/// nonsingular `C`. The `R` factor is the cross-section representative of
/// the orthogonal orbit of `C`.
pub fn qr_positive(c: &Matrix) -> Result<(Transform, Transform)> {
    let (q, r) = qr_positive_matrices(c)?;
    let q = Transform::new(q, TransformKind::Orthogonal)?;
    let r = Transform::new(r, TransformKind::UpperTriangular)?;
    Ok((q, r))
}

/// The maximal invariant `h(C) = C^T C`: constant on orthogonal orbits and
/// separating distinct ones.
pub fn maximal_invariant(c: &Matrix) -> Result<Matrix> {
    if !c.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "maximal invariant needs a square matrix, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    c.transpose().matmul(c)
}

/// Tests whether `c1 = Q c2` for some orthogonal `Q`, returning the witness.
///
/// The candidate `Q = c1 * c2^{-1}` is accepted when `||Q^T Q - I||_max < tol`
/// and returned polished to its nearest orthogonal matrix so it satisfies the
/// transform-class invariant exactly.
pub fn same_orbit(c1: &Matrix, c2: &Matrix, tol: f64) -> Result<Option<Transform>> {
    if !c1.is_square() || !c2.is_square() || c1.rows() != c2.rows() {
        return Err(Error::ShapeMismatch(format!(
            "same_orbit needs square matrices of equal size, got {}x{} and {}x{}",
            c1.rows(),
            c1.cols(),
            c2.rows(),
            c2.cols()
        )));
    }
    for c in [c1, c2] {
        let ratio = singularity_ratio(c);
        if ratio <= SINGULARITY_TOL {
            return Err(Error::SingularInput { ratio });
        }
    }
    // Q = c1 * c2^{-1}, computed as the solution of c2^T X = c1^T transposed.
    let q = c2.transpose().solve(&c1.transpose())?.transpose();
    let d = q.rows();
    let dev = q.transpose().matmul(&q)?.max_abs_diff(&Matrix::identity(d));
    if dev >= tol {
        return Ok(None);
    }
    let polished = polar_orthogonal(&q)?;
    Ok(Some(Transform::new(polished, TransformKind::Orthogonal)?))
}

/// Draws a random transform of the requested class.
///
/// Diagonal and upper-triangular classes fill their nonzero pattern with
/// independent `|N(0, 1)|` draws; the orthogonal class takes the Q factor of
/// the positive-diagonal QR of a standard Gaussian matrix; the general class
/// uses standard Gaussian entries. A draw that fails validation (singular to
/// tolerance) is discarded and redrawn, so the function always succeeds and
/// is deterministic for a fixed generator state.
pub fn sample_transform(kind: TransformKind, d: usize, rng: &mut SplitMix64) -> Transform {
    assert!(d >= 1, "transform dimension must be at least 1");
    loop {
        let candidate = match kind {
            TransformKind::Diagonal => {
                let entries: Vec<f64> = (0..d).map(|_| rng.abs_normal()).collect();
                Transform::new(Matrix::from_diag(&entries), kind)
            }
            TransformKind::UpperTriangular => {
                let mut m = Matrix::zeros(d, d);
                for i in 0..d {
                    for j in i..d {
                        m.set(i, j, rng.abs_normal());
                    }
                }
                Transform::new(m, kind)
            }
            TransformKind::Orthogonal => {
                let g = Matrix::from_fn(d, d, |_, _| rng.standard_normal());
                match qr_positive(&g) {
                    Ok((q, _)) => Ok(q),
                    Err(e) => Err(e),
                }
            }
            TransformKind::General => {
                let g = Matrix::from_fn(d, d, |_, _| rng.standard_normal());
                Transform::new(g, kind)
            }
            TransformKind::ScaledIdentity => {
                let c = rng.abs_normal();
                Transform::scaled_identity(d, c)
            }
        };
        if let Ok(t) = candidate {
            return t;
        }
    }
}

/// Entrywise power of a positive diagonal transform: `diag(l_i) -> diag(l_i^a)`.
pub fn power_diag(lambda: &Transform, alpha: f64) -> Result<Transform> {
    let m = lambda.matrix();
    let d = m.rows();
    for i in 0..d {
        for j in 0..d {
            if i != j && m.get(i, j) != 0.0 {
                return Err(Error::NotDiagonal);
            }
        }
    }
    let mut entries = Vec::with_capacity(d);
    for i in 0..d {
        let v = m.get(i, i);
        if v <= 0.0 {
            return Err(Error::NonpositiveDiagonal);
        }
        let powered = v.powf(alpha);
        if !powered.is_finite() || powered <= 0.0 {
            return Err(Error::NonFiniteEntries("powered diagonal"));
        }
        entries.push(powered);
    }
    Transform::from_diagonal(&entries)
}
