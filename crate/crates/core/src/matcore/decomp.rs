//! Dense decompositions: Householder QR, cyclic Jacobi eigendecomposition
//! for symmetric matrices, one-sided Jacobi (Hestenes) SVD, and the
//! symmetric square-root family built on the eigendecomposition.
//!
//! Everything here is plain `f64` on the row-major [`Matrix`]; the sizes this
//! crate works at (embedding dimension up to a few hundred) do not justify a
//! BLAS backend, and the Jacobi methods give orthogonality near machine
//! precision, which the downstream tolerances rely on.

use crate::error::{Error, Result};
use crate::matcore::matrix::Matrix;

/// Relative threshold below whichever singular value ratio marks a matrix
/// singular for this crate.
pub const SINGULARITY_TOL: f64 = 1e-12;

const JACOBI_EIG_MAX_SWEEPS: usize = 100;
const JACOBI_SVD_MAX_SWEEPS: usize = 60;

/// Thin SVD factors `X = U * diag(sigma) * V^T` with `k = min(rows, cols)`
/// columns in `U` and `V` and `sigma` sorted in non-increasing order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Full SVD via one-sided Jacobi. Columns of `u` and `v` are orthonormal to
/// near machine precision; singular values are non-negative and sorted
/// descending.
pub fn svd(x: &Matrix) -> Svd {
    if x.rows() >= x.cols() {
        one_sided_jacobi(x)
    } else {
        // Work on the transpose so rotations act on the smaller side.
        let t = one_sided_jacobi(&x.transpose());
        Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        }
    }
}

/// Singular values of `x`, descending.
pub fn singular_values(x: &Matrix) -> Vec<f64> {
    svd(x).sigma
}

/// Ratio `sigma_min / sigma_max`, zero for an exactly rank-deficient input.
pub fn singularity_ratio(x: &Matrix) -> f64 {
    let s = singular_values(x);
    let max = s[0];
    let min = s[s.len() - 1];
    if max > 0.0 {
        min / max
    } else {
        0.0
    }
}

fn one_sided_jacobi(a: &Matrix) -> Svd {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut w = a.clone();
    let mut v = Matrix::identity(n);
    let tol = 1e-14;

    for _ in 0..JACOBI_SVD_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    w.set(i, p, c * wp - s * wq);
                    w.set(i, q, s * wp + c * wq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // Column norms are the singular values; sort everything descending.
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|j| {
            let norm = (0..m).map(|i| w.get(i, j).powi(2)).sum::<f64>().sqrt();
            (norm, j)
        })
        .collect();
    order.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

    let sigma: Vec<f64> = order.iter().map(|&(s, _)| s).collect();
    let sigma_max = sigma[0];
    let mut u = Matrix::zeros(m, n);
    let mut v_sorted = Matrix::zeros(n, n);
    let mut completed: Vec<usize> = Vec::new();
    for (out_j, &(s, j)) in order.iter().enumerate() {
        for i in 0..n {
            v_sorted.set(i, out_j, v.get(i, j));
        }
        if s > 0.0 && (sigma_max == 0.0 || s > sigma_max * 1e-290) {
            for i in 0..m {
                u.set(i, out_j, w.get(i, j) / s);
            }
        } else {
            completed.push(out_j);
        }
    }
    // Exactly-zero singular directions get an orthonormal completion so the
    // U factor stays a valid frame.
    for out_j in completed {
        complete_column(&mut u, out_j);
    }

    Svd {
        u,
        sigma,
        v: v_sorted,
    }
}

/// Fills column `j` of `u` with a unit vector orthogonal to all other
/// nonzero columns, by Gram-Schmidt over the coordinate basis.
fn complete_column(u: &mut Matrix, j: usize) {
    let m = u.rows();
    for candidate in 0..m {
        let mut col = vec![0.0; m];
        col[candidate] = 1.0;
        // Two rounds of classical Gram-Schmidt for numerical safety.
        for _ in 0..2 {
            for other in 0..u.cols() {
                if other == j {
                    continue;
                }
                let dot: f64 = (0..m).map(|i| col[i] * u.get(i, other)).sum();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= dot * u.get(i, other);
                }
            }
        }
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.5 {
            for (i, c) in col.iter().enumerate() {
                u.set(i, j, c / norm);
            }
            return;
        }
    }
    // Unreachable for well-formed frames; leave the zero column in place.
}

/// Thin rank-`d` SVD: returns `(A_d, Sigma_d, B_d)` with `A_d` of shape
/// `n x d`, `Sigma_d` the `d x d` diagonal of leading singular values in
/// non-increasing order, and `B_d` of shape `p x d`.
pub fn svd_thin(x: &Matrix, d: usize) -> Result<(Matrix, Matrix, Matrix)> {
    let max_rank = x.rows().min(x.cols());
    if d > max_rank {
        return Err(Error::RankRequestTooLarge {
            requested: d,
            max: max_rank,
        });
    }
    if d == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let full = svd(x);
    let a_d = Matrix::from_fn(x.rows(), d, |i, j| full.u.get(i, j));
    let b_d = Matrix::from_fn(x.cols(), d, |i, j| full.v.get(i, j));
    let sigma_d = Matrix::from_diag(&full.sigma[..d]);
    Ok((a_d, sigma_d, b_d))
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized internally as `(S + S^T) / 2`; callers are
/// expected to pass matrices that are symmetric to around 1e-8. Returns
/// `(E, Lambda)` with `E` orthogonal, `Lambda` diagonal with non-increasing
/// entries, and `E * Lambda * E^T` reproducing the symmetrized input.
pub fn sym_eig_desc(s: &Matrix) -> Result<(Matrix, Matrix)> {
    if !s.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut e = Matrix::identity(n);
    let scale = a.max_abs();
    let tol = 1e-14 * scale;

    for _ in 0..JACOBI_EIG_MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol {
                    continue;
                }
                let tau = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sr = c * t;

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, c * aip - sr * aiq);
                    a.set(p, i, c * aip - sr * aiq);
                    a.set(i, q, sr * aip + c * aiq);
                    a.set(q, i, sr * aip + c * aiq);
                }
                for i in 0..n {
                    let eip = e.get(i, p);
                    let eiq = e.get(i, q);
                    e.set(i, p, c * eip - sr * eiq);
                    e.set(i, q, sr * eip + c * eiq);
                }
            }
        }
    }

    let mut order: Vec<(f64, usize)> = (0..n).map(|i| (a.get(i, i), i)).collect();
    order.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap());
    let lambda = Matrix::from_diag(&order.iter().map(|&(l, _)| l).collect::<Vec<_>>());
    let e_sorted = Matrix::from_fn(n, n, |i, j| e.get(i, order[j].1));
    Ok((e_sorted, lambda))
}

fn spd_eigs(w: &Matrix) -> Result<(Matrix, Vec<f64>)> {
    let (e, lambda) = sym_eig_desc(w)?;
    let eigs = lambda.diagonal();
    let max = eigs[0];
    let min = eigs[eigs.len() - 1];
    if max <= 0.0 || min <= SINGULARITY_TOL * max {
        return Err(Error::NotPositiveDefinite { eigenvalues: eigs });
    }
    Ok((e, eigs))
}

/// Symmetric positive-definite square root `W^{1/2}`.
pub fn sym_sqrt(w: &Matrix) -> Result<Matrix> {
    sym_power(w, 0.5)
}

/// Symmetric positive-definite inverse square root `W^{-1/2}`.
pub fn sym_inv_sqrt(w: &Matrix) -> Result<Matrix> {
    sym_power(w, -0.5)
}

fn sym_power(w: &Matrix, exponent: f64) -> Result<Matrix> {
    let (e, eigs) = spd_eigs(w)?;
    let powered = Matrix::from_diag(&eigs.iter().map(|l| l.powf(exponent)).collect::<Vec<_>>());
    let result = e.matmul(&powered)?.matmul(&e.transpose())?;
    Ok(result.symmetrized())
}

/// QR decomposition of a square nonsingular matrix with the sign convention
/// that makes it unique: the diagonal of `R` is strictly positive. Returns
/// plain matrices; see `matcore::qr_positive` for the transform-typed wrapper.
pub fn qr_positive_matrices(c: &Matrix) -> Result<(Matrix, Matrix)> {
    if !c.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "QR needs a square matrix, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    let ratio = singularity_ratio(c);
    if ratio <= SINGULARITY_TOL {
        return Err(Error::SingularInput { ratio });
    }

    let d = c.rows();
    let mut r = c.clone();
    let mut q = Matrix::identity(d);

    for k in 0..d.saturating_sub(1) {
        let mut v: Vec<f64> = (k..d).map(|i| r.get(i, k)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::SingularInput { ratio: 0.0 });
        }
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 <= f64::MIN_POSITIVE {
            continue; // column already aligned with the axis
        }
        let beta = 2.0 / vnorm2;
        // R <- H R on the trailing block.
        for j in k..d {
            let w: f64 = (k..d).map(|i| v[i - k] * r.get(i, j)).sum();
            for i in k..d {
                let val = r.get(i, j) - beta * w * v[i - k];
                r.set(i, j, val);
            }
        }
        // Q <- Q H.
        for i in 0..d {
            let w: f64 = (k..d).map(|l| q.get(i, l) * v[l - k]).sum();
            for l in k..d {
                let val = q.get(i, l) - beta * w * v[l - k];
                q.set(i, l, val);
            }
        }
    }

    // The strictly-lower part is rounding residue by construction.
    for i in 0..d {
        for j in 0..i {
            r.set(i, j, 0.0);
        }
    }
    // Flip signs so diag(R) > 0; compensating flips keep Q R = C.
    for k in 0..d {
        if r.get(k, k) < 0.0 {
            for j in k..d {
                r.set(k, j, -r.get(k, j));
            }
            for i in 0..d {
                q.set(i, k, -q.get(i, k));
            }
        } else if r.get(k, k) == 0.0 {
            return Err(Error::SingularInput { ratio: 0.0 });
        }
    }
    Ok((q, r))
}

/// Nearest orthogonal matrix in Frobenius norm: the `U V^T` polar factor.
pub fn polar_orthogonal(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "polar factor needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let f = svd(m);
    f.u.matmul(&f.v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::rng::SplitMix64;

    fn random_matrix(rng: &mut SplitMix64, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| rng.standard_normal())
    }

    #[test]
    fn qr_identity_fixed_point() {
        let (q, r) = qr_positive_matrices(&Matrix::identity(2)).unwrap();
        assert!(q.max_abs_diff(&Matrix::identity(2)) < 1e-14);
        assert!(r.max_abs_diff(&Matrix::identity(2)) < 1e-14);
    }

    #[test]
    fn qr_hand_example() {
        // Gram-Schmidt by hand: columns (0,1) and (2,0).
        let c = Matrix::from_rows(&[&[0.0, 2.0], &[1.0, 0.0]]).unwrap();
        let (q, r) = qr_positive_matrices(&c).unwrap();
        let q_expect = Matrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let r_expect = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, 2.0]]).unwrap();
        assert!(q.max_abs_diff(&q_expect) < 1e-12);
        assert!(r.max_abs_diff(&r_expect) < 1e-12);
        assert!(q.matmul(&r).unwrap().max_abs_diff(&c) < 1e-10);
    }

    #[test]
    fn qr_random_properties() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..20 {
            let c = random_matrix(&mut rng, 5, 5);
            let (q, r) = qr_positive_matrices(&c).unwrap();
            assert!(q.matmul(&r).unwrap().max_abs_diff(&c) < 1e-10);
            let qtq = q.transpose().matmul(&q).unwrap();
            assert!(qtq.max_abs_diff(&Matrix::identity(5)) < 1e-10);
            for k in 0..5 {
                assert!(r.get(k, k) > 0.0);
            }
        }
    }

    #[test]
    fn qr_rejects_singular() {
        let c = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]).unwrap();
        assert!(matches!(
            qr_positive_matrices(&c),
            Err(Error::SingularInput { .. })
        ));
    }

    #[test]
    fn svd_diagonal_input() {
        let x = Matrix::from_diag(&[3.0, 2.0, 1.0]);
        let (_, sigma, _) = svd_thin(&x, 2).unwrap();
        assert!((sigma.get(0, 0) - 3.0).abs() < 1e-12);
        assert!((sigma.get(1, 1) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn svd_handles_exact_rank_deficiency() {
        let x = Matrix::from_diag(&[1.0, 0.0]);
        let (a, sigma, b) = svd_thin(&x, 1).unwrap();
        assert!((sigma.get(0, 0) - 1.0).abs() < 1e-14);
        // Orthonormal single columns.
        assert!((a.col(0).iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((b.col(0).iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        // Full-rank request completes the zero direction orthonormally.
        let (a2, sigma2, _) = svd_thin(&x, 2).unwrap();
        assert_eq!(sigma2.get(1, 1), 0.0);
        let gram = a2.transpose().matmul(&a2).unwrap();
        assert!(gram.max_abs_diff(&Matrix::identity(2)) < 1e-10);
    }

    #[test]
    fn svd_eckart_young_residual() {
        let mut rng = SplitMix64::new(3);
        let x = random_matrix(&mut rng, 8, 6);
        let d = 3;
        let (a, sigma, b) = svd_thin(&x, d).unwrap();
        let approx = a.matmul(&sigma).unwrap().matmul(&b.transpose()).unwrap();
        let residual = x.sub(&approx).unwrap().frobenius_norm();
        // Discarded spectrum from an independent route: eigenvalues of X^T X.
        let gram = x.transpose().matmul(&x).unwrap();
        let (_, lambda) = sym_eig_desc(&gram).unwrap();
        let tail: f64 = lambda.diagonal()[d..].iter().map(|l| l.max(0.0)).sum();
        assert!((residual - tail.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn svd_orthonormal_factors() {
        let mut rng = SplitMix64::new(14);
        for &(m, n) in &[(6usize, 4usize), (4, 6), (5, 5)] {
            let x = random_matrix(&mut rng, m, n);
            let f = svd(&x);
            let k = m.min(n);
            let utu = f.u.transpose().matmul(&f.u).unwrap();
            let vtv = f.v.transpose().matmul(&f.v).unwrap();
            assert!(utu.max_abs_diff(&Matrix::identity(k)) < 1e-10);
            assert!(vtv.max_abs_diff(&Matrix::identity(k)) < 1e-10);
            for i in 1..k {
                assert!(f.sigma[i - 1] >= f.sigma[i]);
            }
        }
    }

    #[test]
    fn eig_identity() {
        let (_, lambda) = sym_eig_desc(&Matrix::identity(3)).unwrap();
        assert!(lambda.max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn eig_sorts_descending_with_signed_permutation() {
        let s = Matrix::from_diag(&[1.0, 4.0]);
        let (e, lambda) = sym_eig_desc(&s).unwrap();
        assert!((lambda.get(0, 0) - 4.0).abs() < 1e-12);
        assert!((lambda.get(1, 1) - 1.0).abs() < 1e-12);
        // E maps coordinates to a signed permutation.
        for j in 0..2 {
            let col = e.col(j);
            let big = col.iter().filter(|x| x.abs() > 0.9).count();
            assert_eq!(big, 1);
        }
    }

    #[test]
    fn eig_reconstructs_random_symmetric() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..20 {
            let g = random_matrix(&mut rng, 5, 5);
            let s = g.add(&g.transpose()).unwrap().scale(0.5);
            let (e, lambda) = sym_eig_desc(&s).unwrap();
            let rebuilt = e.matmul(&lambda).unwrap().matmul(&e.transpose()).unwrap();
            assert!(rebuilt.max_abs_diff(&s) < 1e-9);
        }
    }

    #[test]
    fn sqrt_diagonal_case() {
        let w = Matrix::from_diag(&[4.0, 1.0]);
        let root = sym_sqrt(&w).unwrap();
        assert!(root.max_abs_diff(&Matrix::from_diag(&[2.0, 1.0])) < 1e-12);
        assert!(sym_sqrt(&Matrix::identity(3))
            .unwrap()
            .max_abs_diff(&Matrix::identity(3))
            < 1e-12);
    }

    #[test]
    fn sqrt_and_inverse_sqrt_roundtrip() {
        let mut rng = SplitMix64::new(21);
        for _ in 0..20 {
            let g = random_matrix(&mut rng, 4, 4);
            let w = g
                .transpose()
                .matmul(&g)
                .unwrap()
                .add(&Matrix::identity(4))
                .unwrap();
            let root = sym_sqrt(&w).unwrap();
            assert!(root.matmul(&root).unwrap().max_abs_diff(&w) < 1e-9);
            let inv_root = sym_inv_sqrt(&w).unwrap();
            let ident = inv_root.matmul(&w).unwrap().matmul(&inv_root).unwrap();
            assert!(ident.max_abs_diff(&Matrix::identity(4)) < 1e-9);
        }
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let w = Matrix::from_diag(&[1.0, -2.0]);
        assert!(matches!(
            sym_sqrt(&w),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn polar_factor_is_orthogonal() {
        let mut rng = SplitMix64::new(33);
        let m = random_matrix(&mut rng, 4, 4);
        let q = polar_orthogonal(&m).unwrap();
        let qtq = q.transpose().matmul(&q).unwrap();
        assert!(qtq.max_abs_diff(&Matrix::identity(4)) < 1e-12);
    }
}
