//! Score maximization over the diagonal slice of the gauge group, with a
//! self-contained Nelder-Mead simplex optimizer and k-fold cross-validation
//! utilities.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate, Embedding, Method, OovPolicy, SimilarityTestSet};
use crate::matcore::{Matrix, SplitMix64, Transform};

/// Options for the simplex optimizer. Defaults: `max_evals = 500 k`,
/// `ftol = 1e-8`, `initial_step = 0.1`, and the standard
/// reflection/expansion/contraction/shrink coefficients 1, 2, 0.5, 0.5.
#[derive(Debug, Clone, Copy)]
pub struct OptimizerOptions {
    /// Budget of objective evaluations; `None` means `500 * k`.
    pub max_evals: Option<usize>,
    pub ftol: f64,
    pub initial_step: f64,
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            max_evals: None,
            ftol: 1e-8,
            initial_step: 0.1,
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
        }
    }
}

impl OptimizerOptions {
    fn validate(&self, k: usize) -> Result<usize> {
        if self.reflection <= 0.0
            || self.expansion <= 1.0
            || self.expansion <= self.reflection
            || !(0.0..1.0).contains(&self.contraction)
            || self.contraction <= 0.0
            || !(0.0..1.0).contains(&self.shrink)
            || self.shrink <= 0.0
        {
            return Err(Error::InvalidArgument(
                "simplex coefficients outside their admissible ranges".into(),
            ));
        }
        if self.ftol < 0.0 || self.initial_step <= 0.0 {
            return Err(Error::InvalidArgument(
                "ftol must be >= 0 and initial_step > 0".into(),
            ));
        }
        let max_evals = self.max_evals.unwrap_or(500 * k.max(1));
        if max_evals < k + 1 {
            return Err(Error::InvalidArgument(format!(
                "max_evals = {max_evals} below simplex size {}",
                k + 1
            )));
        }
        Ok(max_evals)
    }
}

/// Minimizes `objective` from `x0` with the Nelder-Mead simplex method.
///
/// The initial simplex is `x0` plus one vertex per coordinate at
/// `x0 + initial_step * e_i`. Terminates when the spread of function values
/// over the simplex drops below `ftol` — with the simplex diameter also
/// below `sqrt(ftol)`, so a flat shelf cannot stop the search while the
/// simplex is still wide — or when the evaluation budget is spent; returns
/// the best vertex seen, so the result is never worse than `f(x0)`.
/// Vertices with equal values are ordered by insertion index, which makes
/// runs reproducible.
pub fn nelder_mead(
    mut objective: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: &OptimizerOptions,
) -> Result<(Vec<f64>, f64)> {
    let k = x0.len();
    if k == 0 {
        return Err(Error::InvalidArgument("empty starting point".into()));
    }
    let max_evals = opts.validate(k)?;

    // Simplex vertices with (value, tie-break index).
    let mut vertices: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    vertices.push(x0.to_vec());
    for i in 0..k {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        vertices.push(v);
    }
    let mut evals = 0usize;
    let mut values = Vec::with_capacity(k + 1);
    for (i, v) in vertices.iter().enumerate() {
        let f = objective(v);
        evals += 1;
        if !f.is_finite() {
            return Err(Error::NonFiniteObjective { vertex: i });
        }
        values.push(f);
    }
    let mut order: Vec<usize> = (0..=k).collect();
    let xtol = opts.ftol.sqrt();

    loop {
        // Sort vertex indices by value, stable in the original index.
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
        let best = order[0];
        let worst = order[k];
        let second_worst = order[k - 1];
        let spread = values[worst] - values[best];
        let diameter = vertices
            .iter()
            .flat_map(|v| v.iter().zip(&vertices[best]).map(|(a, b)| (a - b).abs()))
            .fold(0.0_f64, f64::max);
        if (spread < opts.ftol && diameter <= xtol) || evals >= max_evals {
            return Ok((vertices[best].clone(), values[best]));
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; k];
        for &idx in &order[..k] {
            for (c, x) in centroid.iter_mut().zip(&vertices[idx]) {
                *c += x / k as f64;
            }
        }

        let point_along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&vertices[worst])
                .map(|(c, w)| c + coef * (c - w))
                .collect()
        };

        let reflected = point_along(opts.reflection);
        let f_reflected = objective(&reflected);
        evals += 1;

        if f_reflected < values[best] {
            // Try to expand past the reflection.
            let expanded = point_along(opts.reflection * opts.expansion);
            let f_expanded = objective(&expanded);
            evals += 1;
            if f_expanded < f_reflected {
                vertices[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                vertices[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            vertices[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        // Contract, outside or inside of the worst vertex.
        let contracted = if f_reflected < values[worst] {
            point_along(opts.reflection * opts.contraction)
        } else {
            point_along(-opts.contraction)
        };
        let f_contracted = objective(&contracted);
        evals += 1;
        if f_contracted < values[worst].min(f_reflected) {
            vertices[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // Shrink toward the best vertex.
        for &idx in &order[1..] {
            let shrunk: Vec<f64> = vertices[best]
                .iter()
                .zip(&vertices[idx])
                .map(|(b, x)| b + opts.shrink * (x - b))
                .collect();
            let f = objective(&shrunk);
            evals += 1;
            vertices[idx] = shrunk;
            values[idx] = f;
        }
    }
}

/// Result of optimizing the diagonal slice for one training set.
#[derive(Debug, Clone, Serialize)]
pub struct DiagOptResult {
    /// Optimal diagonal, normalized to geometric mean 1 (the scaled-identity
    /// direction is score-invariant, so this fixes that residual gauge).
    pub lambda_star: Vec<f64>,
    pub train_score: f64,
    pub init_score: f64,
    pub evals_used: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holdout_score: Option<f64>,
}

impl DiagOptResult {
    pub fn lambda_transform(&self) -> Result<Transform> {
        Transform::from_diagonal(&self.lambda_star)
    }
}

fn scaled_embedding(v_star: &Embedding, lambda: &[f64]) -> Result<Embedding> {
    let scaled = Matrix::from_fn(v_star.dim(), v_star.len(), |i, j| {
        lambda[i] * v_star.v().get(i, j)
    });
    v_star.with_v(scaled)
}

/// Maximizes the task score over `Lambda = diag(lambda_1..lambda_d)`.
///
/// The search runs in log coordinates `lambda_i = exp(x_i)` starting from
/// `Lambda = I`; positivity costs nothing because sign flips are orthogonal
/// and score-invariant. Evaluation failures away from the start count as
/// infinitely bad rather than aborting the search. The reported training
/// score is re-evaluated at the normalized `lambda_star`, so re-running it
/// reproduces `train_score` exactly.
pub fn optimize_diag(
    v_star: &Embedding,
    train: &SimilarityTestSet,
    method: Method,
    opts: &OptimizerOptions,
) -> Result<DiagOptResult> {
    let d = v_star.dim();
    let init_score = evaluate(v_star, train, method, OovPolicy::Skip)?.score;

    let mut evals_used = 0usize;
    let objective = |x: &[f64]| -> f64 {
        let lambda: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        if lambda.iter().any(|l| !l.is_finite() || *l <= 0.0) {
            return f64::INFINITY;
        }
        match scaled_embedding(v_star, &lambda)
            .and_then(|emb| evaluate(&emb, train, method, OovPolicy::Skip))
        {
            Ok(report) => -report.score,
            Err(_) => f64::INFINITY,
        }
    };
    let counted = |x: &[f64]| {
        evals_used += 1;
        objective(x)
    };

    let x0 = vec![0.0; d];
    let (x_star, _) = nelder_mead(counted, &x0, opts)?;

    // Normalize to geometric mean 1: subtract the mean in log space.
    let mean = x_star.iter().sum::<f64>() / d as f64;
    let lambda_star: Vec<f64> = x_star.iter().map(|v| (v - mean).exp()).collect();
    let train_score = evaluate(
        &scaled_embedding(v_star, &lambda_star)?,
        train,
        method,
        OovPolicy::Skip,
    )?
    .score;

    Ok(DiagOptResult {
        lambda_star,
        train_score,
        init_score,
        evals_used,
        holdout_score: None,
    })
}

/// Result of optimizing over the full upper-triangular slice.
#[derive(Debug, Clone, Serialize)]
pub struct UpperOptResult {
    /// Optimal upper-triangular transform (row-major), positive diagonal
    /// normalized to geometric mean 1.
    pub r_star: Vec<Vec<f64>>,
    pub train_score: f64,
    pub init_score: f64,
    pub evals_used: usize,
}

fn upper_from_params(d: usize, x: &[f64]) -> Matrix {
    let mut r = Matrix::zeros(d, d);
    for (i, v) in x.iter().take(d).enumerate() {
        r.set(i, i, v.exp());
    }
    let mut k = d;
    for i in 0..d {
        for j in i + 1..d {
            r.set(i, j, x[k]);
            k += 1;
        }
    }
    r
}

/// Maximizes the task score over the full upper-triangular slice, the whole
/// set of transforms that move the score while preserving the training
/// objective. The search space has dimension `d (d + 1) / 2`, usually far
/// larger than the number of test pairs, so this is prone to overfitting
/// and is not the default; prefer [`optimize_diag`] unless cross-validating.
pub fn optimize_upper(
    v_star: &Embedding,
    train: &SimilarityTestSet,
    method: Method,
    opts: &OptimizerOptions,
) -> Result<UpperOptResult> {
    let d = v_star.dim();
    let init_score = evaluate(v_star, train, method, OovPolicy::Skip)?.score;

    let mut evals_used = 0usize;
    let score_of = |r: &Matrix| -> f64 {
        match r
            .matmul(v_star.v())
            .and_then(|v| v_star.with_v(v))
            .and_then(|emb| evaluate(&emb, train, method, OovPolicy::Skip))
        {
            Ok(report) => -report.score,
            Err(_) => f64::INFINITY,
        }
    };
    let objective = |x: &[f64]| -> f64 {
        if x[..d].iter().any(|v| !v.exp().is_finite()) {
            return f64::INFINITY;
        }
        score_of(&upper_from_params(d, x))
    };
    let counted = |x: &[f64]| {
        evals_used += 1;
        objective(x)
    };

    let k = d * (d + 1) / 2;
    let (x_star, _) = nelder_mead(counted, &vec![0.0; k], opts)?;

    // Remove the scaled-identity redundancy: unit geometric-mean diagonal.
    let mean = x_star[..d].iter().sum::<f64>() / d as f64;
    let scale = (-mean).exp();
    let r = upper_from_params(d, &x_star).scale(scale);
    let train_score = -score_of(&r);

    Ok(UpperOptResult {
        r_star: (0..d).map(|i| r.row(i).to_vec()).collect(),
        train_score,
        init_score,
        evals_used,
    })
}

/// Splits pairs into `k` folds of sizes differing by at most one, after a
/// seeded shuffle. Deterministic per seed.
pub fn kfold_split(
    pairs: &[(String, String, f64)],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<(String, String, f64)>>> {
    let n = pairs.len();
    if k < 2 || k > n {
        return Err(Error::BadK { k, n });
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    rng.shuffle(&mut indices);
    let base = n / k;
    let extra = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut cursor = 0usize;
    for fold in 0..k {
        let size = base + usize::from(fold < extra);
        let members = indices[cursor..cursor + size]
            .iter()
            .map(|&i| pairs[i].clone())
            .collect();
        folds.push(members);
        cursor += size;
    }
    Ok(folds)
}

/// Per-fold outcome of cross-validated diagonal optimization.
#[derive(Debug, Clone, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_score: f64,
    pub init_score: f64,
    pub holdout_score: f64,
    pub lambda_star: Vec<f64>,
}

/// Full cross-validation report.
#[derive(Debug, Clone, Serialize)]
pub struct CrossValResult {
    pub folds: Vec<FoldResult>,
    pub mean_holdout: f64,
}

/// Runs [`optimize_diag`] on each union of `k - 1` folds and evaluates the
/// found diagonal on the held-out fold. Both scores are reported per fold;
/// no ordering between them is asserted, since overfitting can point either
/// way on small sets.
pub fn cross_validated_optimize(
    v_star: &Embedding,
    testset: &SimilarityTestSet,
    method: Method,
    k: usize,
    seed: u64,
    opts: &OptimizerOptions,
) -> Result<CrossValResult> {
    let folds = kfold_split(&testset.pairs, k, seed)?;
    let mut results = Vec::with_capacity(k);
    let mut holdout_sum = 0.0;
    for held_out in 0..k {
        let train_pairs: Vec<(String, String, f64)> = folds
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != held_out)
            .flat_map(|(_, f)| f.iter().cloned())
            .collect();
        let train = SimilarityTestSet::new(format!("{}-train{held_out}", testset.name), train_pairs)?;
        let holdout = SimilarityTestSet::new(
            format!("{}-holdout{held_out}", testset.name),
            folds[held_out].clone(),
        )?;
        let opt = optimize_diag(v_star, &train, method, opts)?;
        let holdout_score = evaluate(
            &scaled_embedding(v_star, &opt.lambda_star)?,
            &holdout,
            method,
            OovPolicy::Skip,
        )?
        .score;
        holdout_sum += holdout_score;
        results.push(FoldResult {
            fold: held_out,
            train_score: opt.train_score,
            init_score: opt.init_score,
            holdout_score,
            lambda_star: opt.lambda_star,
        });
    }
    Ok(CrossValResult {
        mean_holdout: holdout_sum / k as f64,
        folds: results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let objective = |x: &[f64]| (x[0] - 1.0).powi(2) + (x[1] - 2.0).powi(2);
        let (x, f) = nelder_mead(objective, &[0.0, 0.0], &OptimizerOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-4, "x = {x:?}");
        assert!((x[1] - 2.0).abs() < 1e-4, "x = {x:?}");
        assert!(f < 1e-7);
    }

    #[test]
    fn nelder_mead_constant_objective_returns_start() {
        let (x, f) = nelder_mead(|_| 5.0, &[1.0, 2.0, 3.0], &OptimizerOptions::default()).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
        assert_eq!(f, 5.0);
    }

    #[test]
    fn nelder_mead_handles_nonsmooth_objective() {
        let (x, _) = nelder_mead(
            |x: &[f64]| (x[0] - 3.0).abs(),
            &[0.0],
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert!((x[0] - 3.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_rejects_nonfinite_start() {
        let err = nelder_mead(
            |x: &[f64]| if x[0] > 0.05 { f64::NAN } else { 0.0 },
            &[0.0],
            &OptimizerOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonFiniteObjective { .. }));
    }

    #[test]
    fn nelder_mead_never_beats_budget() {
        let mut count = 0usize;
        let opts = OptimizerOptions {
            max_evals: Some(40),
            ftol: 0.0,
            ..OptimizerOptions::default()
        };
        let _ = nelder_mead(
            |x: &[f64]| {
                count += 1;
                x.iter().map(|v| v * v).sum()
            },
            &[5.0, 5.0],
            &opts,
        )
        .unwrap();
        // One iteration may finish in flight; allow the final partial step.
        assert!(count <= 44, "used {count} evaluations");
    }

    #[test]
    fn nelder_mead_is_deterministic() {
        let run = || {
            nelder_mead(
                |x: &[f64]| (x[0] + 2.0).powi(2) * (1.0 + x[1].sin().abs()),
                &[4.0, 1.0],
                &OptimizerOptions::default(),
            )
            .unwrap()
        };
        let (x1, f1) = run();
        let (x2, f2) = run();
        assert_eq!(x1, x2);
        assert_eq!(f1, f2);
    }

    fn witness_embedding() -> Embedding {
        // Four words whose pairwise-cosine ordering is wrong at Lambda = I
        // but fixable by stretching the first axis.
        let v = Matrix::from_rows(&[
            &[1.0, 0.0, 1.0, 2.0],
            &[0.0, 1.0, 1.0, 2.0],
        ])
        .unwrap();
        Embedding::new(
            vec!["east".into(), "north".into(), "mid".into(), "mid2".into()],
            v,
        )
        .unwrap()
    }

    fn witness_testset() -> SimilarityTestSet {
        SimilarityTestSet::new(
            "witness",
            vec![
                ("east".into(), "north".into(), 1.0),
                ("north".into(), "mid".into(), 2.0),
                ("east".into(), "mid".into(), 3.0),
                ("mid".into(), "mid2".into(), 4.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn optimize_diag_improves_on_constructed_witness() {
        let emb = witness_embedding();
        let ts = witness_testset();
        let result =
            optimize_diag(&emb, &ts, Method::Spearman, &OptimizerOptions::default()).unwrap();
        assert!(result.train_score > result.init_score + 1e-6);

        // Grid-search oracle over a 13x13 log grid on [0.25, 4]^2.
        let grid: Vec<f64> = (0..13)
            .map(|i| 0.25 * (16.0_f64).powf(i as f64 / 12.0))
            .collect();
        let mut best = f64::NEG_INFINITY;
        for &l1 in &grid {
            for &l2 in &grid {
                let scaled = scaled_embedding(&emb, &[l1, l2]).unwrap();
                let score = evaluate(&scaled, &ts, Method::Spearman, OovPolicy::Skip)
                    .unwrap()
                    .score;
                best = best.max(score);
            }
        }
        assert!(
            (result.train_score - best).abs() <= 0.01,
            "optimizer {} vs grid {}",
            result.train_score,
            best
        );
    }

    #[test]
    fn optimize_diag_respects_score_floor() {
        let emb = witness_embedding();
        let ts = witness_testset();
        for method in [Method::Spearman, Method::Pearson] {
            let result = optimize_diag(&emb, &ts, method, &OptimizerOptions::default()).unwrap();
            assert!(result.train_score >= result.init_score - 1e-12);
        }
    }

    #[test]
    fn optimize_diag_one_dimension_is_scale_invariant() {
        // d = 1: every diagonal is a scaled identity, so the score is flat.
        let v = Matrix::from_rows(&[&[1.0, 2.0, -1.5, 0.5]]).unwrap();
        let emb = Embedding::new(
            vec!["a".into(), "b".into(), "c".into(), "d".into()],
            v,
        )
        .unwrap();
        let ts = SimilarityTestSet::new(
            "flat",
            vec![
                ("a".into(), "b".into(), 1.0),
                ("a".into(), "c".into(), 2.0),
                ("b".into(), "d".into(), 3.0),
            ],
        )
        .unwrap();
        let result =
            optimize_diag(&emb, &ts, Method::Spearman, &OptimizerOptions::default()).unwrap();
        assert!((result.train_score - result.init_score).abs() < 1e-12);
        assert!((result.lambda_star[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn optimize_diag_reported_lambda_reproduces_score() {
        let emb = witness_embedding();
        let ts = witness_testset();
        let result =
            optimize_diag(&emb, &ts, Method::Spearman, &OptimizerOptions::default()).unwrap();
        let rebuilt = scaled_embedding(&emb, &result.lambda_star).unwrap();
        let score = evaluate(&rebuilt, &ts, Method::Spearman, OovPolicy::Skip)
            .unwrap()
            .score;
        assert!((score - result.train_score).abs() < 1e-12);
        // Geometric mean pinned to 1.
        let log_mean: f64 =
            result.lambda_star.iter().map(|l| l.ln()).sum::<f64>() / result.lambda_star.len() as f64;
        assert!(log_mean.abs() < 1e-12);
    }

    #[test]
    fn optimize_diag_scale_redundancy() {
        let emb = witness_embedding();
        let ts = witness_testset();
        let result =
            optimize_diag(&emb, &ts, Method::Spearman, &OptimizerOptions::default()).unwrap();
        for c in [0.1, 3.0, 42.0] {
            let scaled: Vec<f64> = result.lambda_star.iter().map(|l| c * l).collect();
            let emb_scaled = scaled_embedding(&emb, &scaled).unwrap();
            let score = evaluate(&emb_scaled, &ts, Method::Spearman, OovPolicy::Skip)
                .unwrap()
                .score;
            assert!((score - result.train_score).abs() < 1e-10);
        }
    }

    #[test]
    fn optimize_upper_contains_the_diagonal_slice() {
        // The upper-triangular slice includes every diagonal, so the witness
        // improves here too, and the floor holds.
        let emb = witness_embedding();
        let ts = witness_testset();
        let result =
            optimize_upper(&emb, &ts, Method::Spearman, &OptimizerOptions::default()).unwrap();
        assert!(result.train_score >= result.init_score - 1e-12);
        assert!(result.train_score > result.init_score + 1e-6);
        // Reported transform is upper-triangular with positive diagonal and
        // reproduces the score.
        let d = 2;
        let r = Matrix::from_rows(&[&result.r_star[0][..], &result.r_star[1][..]]).unwrap();
        for i in 0..d {
            assert!(r.get(i, i) > 0.0);
            for j in 0..i {
                assert_eq!(r.get(i, j), 0.0);
            }
        }
        let moved = emb.with_v(r.matmul(emb.v()).unwrap()).unwrap();
        let score = evaluate(&moved, &ts, Method::Spearman, OovPolicy::Skip)
            .unwrap()
            .score;
        assert!((score - result.train_score).abs() < 1e-12);
    }

    fn pair_list(n: usize) -> Vec<(String, String, f64)> {
        (0..n)
            .map(|i| (format!("a{i}"), format!("b{i}"), i as f64))
            .collect()
    }

    #[test]
    fn kfold_partitions_the_pairs() {
        let pairs = pair_list(11);
        let folds = kfold_split(&pairs, 3, 9).unwrap();
        assert_eq!(folds.len(), 3);
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 11);
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        let mut all: Vec<String> = folds
            .iter()
            .flatten()
            .map(|(a, _, _)| a.clone())
            .collect();
        all.sort();
        let mut expect: Vec<String> = pairs.iter().map(|(a, _, _)| a.clone()).collect();
        expect.sort();
        assert_eq!(all, expect);
    }

    #[test]
    fn kfold_leave_one_out_and_determinism() {
        let pairs = pair_list(5);
        let folds = kfold_split(&pairs, 5, 1).unwrap();
        assert!(folds.iter().all(|f| f.len() == 1));
        assert_eq!(
            kfold_split(&pairs, 3, 123).unwrap(),
            kfold_split(&pairs, 3, 123).unwrap()
        );
    }

    #[test]
    fn kfold_rejects_bad_k() {
        let pairs = pair_list(4);
        assert!(matches!(kfold_split(&pairs, 1, 0), Err(Error::BadK { .. })));
        assert!(matches!(kfold_split(&pairs, 5, 0), Err(Error::BadK { .. })));
    }

    #[test]
    fn cross_validation_reports_both_scores_per_fold() {
        // Eight pairs over the witness vocabulary so each half stays scoreable.
        let emb = witness_embedding();
        let mut pairs = witness_testset().pairs;
        pairs.extend(vec![
            ("north".into(), "east".into(), 1.5),
            ("mid".into(), "north".into(), 2.5),
            ("mid".into(), "east".into(), 3.5),
            ("mid2".into(), "east".into(), 3.2),
        ]);
        let ts = SimilarityTestSet::new("cv", pairs).unwrap();
        let result = cross_validated_optimize(
            &emb,
            &ts,
            Method::Spearman,
            2,
            7,
            &OptimizerOptions::default(),
        )
        .unwrap();
        assert_eq!(result.folds.len(), 2);
        for fold in &result.folds {
            assert!(fold.train_score >= fold.init_score - 1e-12);
            assert!(fold.holdout_score.is_finite());
        }
        let mean: f64 =
            result.folds.iter().map(|f| f.holdout_score).sum::<f64>() / result.folds.len() as f64;
        assert!((mean - result.mean_holdout).abs() < 1e-12);
    }
}
