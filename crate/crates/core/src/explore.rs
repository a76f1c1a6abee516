//! Solution-set exploration: score sweeps along one-parameter diagonal
//! subgroups and score distributions under random gauge transforms.
//!
//! Trials are seeded individually (base seed plus trial index fed through the
//! generator), so a parallel schedule would produce the same output as the
//! serial one. Execution here is serial; results are in trial order.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::eval::{evaluate, Embedding, Method, OovPolicy, SimilarityTestSet};
use crate::matcore::{power_diag, sample_transform, SplitMix64, Transform, TransformKind};

/// One scored point of an alpha sweep. `score` is `Err` when evaluation
/// failed for that row; the sweep continues past failures.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub alpha: f64,
    pub lambda: String,
    pub testset: String,
    pub method: Method,
    pub score: std::result::Result<f64, String>,
}

/// Scores along `V = Lambda^alpha V*` for each alpha and test set.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

/// Sweeps the one-parameter family `alpha -> Lambda^alpha V*`.
///
/// Alphas must be strictly increasing. The `alpha = 0` row reproduces the
/// base evaluation exactly: the zeroth power is exactly the identity.
pub fn alpha_sweep(
    v_star: &Embedding,
    lambda: &Transform,
    lambda_label: &str,
    alphas: &[f64],
    testsets: &[&SimilarityTestSet],
    method: Method,
) -> Result<SweepResult> {
    if lambda.dim() != v_star.dim() {
        return Err(Error::ShapeMismatch(format!(
            "lambda is {0}x{0}, embedding dimension is {1}",
            lambda.dim(),
            v_star.dim()
        )));
    }
    if alphas.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "alphas must be strictly increasing".into(),
        ));
    }
    let mut rows = Vec::with_capacity(alphas.len() * testsets.len());
    for &alpha in alphas {
        let powered = power_diag(lambda, alpha);
        for ts in testsets {
            let score = powered
                .as_ref()
                .map_err(|e| e.to_string())
                .and_then(|p| {
                    let v = p.matrix().matmul(v_star.v()).map_err(|e| e.to_string())?;
                    let emb = v_star.with_v(v).map_err(|e| e.to_string())?;
                    evaluate(&emb, ts, method, OovPolicy::Skip)
                        .map(|r| r.score)
                        .map_err(|e| e.to_string())
                });
            rows.push(SweepRow {
                alpha,
                lambda: lambda_label.to_owned(),
                testset: ts.name.clone(),
                method,
                score,
            });
        }
    }
    Ok(SweepResult { rows })
}

/// The four diagonal presets used for sweeps, in a fixed order:
/// `sigma` (the supplied singular values), `linear` (`lambda_i = i`),
/// `uniform` (`U(0, 1)` draws, resampled when below `1e-12`), and
/// `absnormal` (`|N(0, 1)|` draws).
pub fn lambda_presets(sigma: &[f64], seed: u64) -> Result<Vec<(String, Transform)>> {
    if sigma.is_empty() {
        return Err(Error::InvalidArgument("sigma must be non-empty".into()));
    }
    let d = sigma.len();
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(4);
    out.push(("sigma".to_owned(), Transform::from_diagonal(sigma)?));
    let linear: Vec<f64> = (1..=d).map(|i| i as f64).collect();
    out.push(("linear".to_owned(), Transform::from_diagonal(&linear)?));
    let uniform: Vec<f64> = (0..d)
        .map(|_| loop {
            let u = rng.uniform();
            if u >= 1e-12 {
                break u;
            }
        })
        .collect();
    out.push(("uniform".to_owned(), Transform::from_diagonal(&uniform)?));
    let absnormal = sample_transform(TransformKind::Diagonal, d, &mut rng);
    out.push(("absnormal".to_owned(), absnormal));
    Ok(out)
}

/// Mean, sample standard deviation, and range of a score list.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
}

impl Summary {
    pub fn from_scores(scores: &[f64]) -> Option<Summary> {
        if scores.is_empty() {
            return None;
        }
        let n = scores.len() as f64;
        let mean = scores.iter().sum::<f64>() / n;
        let sd = if scores.len() > 1 {
            (scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Some(Summary { mean, sd, min, max })
    }
}

/// Score distribution over random gauge transforms of one embedding.
#[derive(Debug, Clone)]
pub struct TrialDistribution {
    pub kind: TransformKind,
    /// `(trial index, score)` for successful trials, in trial order.
    pub scores: Vec<(usize, f64)>,
    /// `(trial index, reason)` for failed trials.
    pub failures: Vec<(usize, String)>,
    pub base_score: f64,
    pub seed: u64,
    pub summary: Option<Summary>,
}

impl TrialDistribution {
    pub fn score_values(&self) -> Vec<f64> {
        self.scores.iter().map(|&(_, s)| s).collect()
    }
}

/// Evaluates `n_runs` random transforms `R_i V*`, each drawn from its own
/// generator seeded with `seed + i`, and records the distribution of scores
/// next to the untransformed base score.
pub fn random_transform_study(
    v_star: &Embedding,
    kind: TransformKind,
    n_runs: usize,
    seed: u64,
    testset: &SimilarityTestSet,
    method: Method,
) -> Result<TrialDistribution> {
    let base_score = evaluate(v_star, testset, method, OovPolicy::Skip)?.score;
    let d = v_star.dim();
    let mut scores = Vec::with_capacity(n_runs);
    let mut failures = Vec::new();
    for trial in 0..n_runs {
        let mut rng = SplitMix64::new(seed.wrapping_add(trial as u64));
        let transform = sample_transform(kind, d, &mut rng);
        let outcome = transform
            .matrix()
            .matmul(v_star.v())
            .map_err(|e| e.to_string())
            .and_then(|v| v_star.with_v(v).map_err(|e| e.to_string()))
            .and_then(|emb| {
                evaluate(&emb, testset, method, OovPolicy::Skip)
                    .map(|r| r.score)
                    .map_err(|e| e.to_string())
            });
        match outcome {
            Ok(score) => scores.push((trial, score)),
            Err(reason) => failures.push((trial, reason)),
        }
    }
    let summary = Summary::from_scores(&scores.iter().map(|&(_, s)| s).collect::<Vec<_>>());
    Ok(TrialDistribution {
        kind,
        scores,
        failures,
        base_score,
        seed,
        summary,
    })
}

/// Floats are printed with 17 significant digits so a reader recovers the
/// exact binary64 value.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl SweepResult {
    /// Writes the CSV to a destination.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    /// CSV with columns `alpha,lambda,testset,method,score`; failed rows
    /// carry `failed:<reason>` in the score column.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,lambda,testset,method,score\n");
        for row in &self.rows {
            let score = match &row.score {
                Ok(s) => fmt_f64(*s),
                Err(reason) => format!("failed:{}", reason.replace(',', ";")),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_f64(row.alpha),
                row.lambda,
                row.testset,
                row.method.as_str(),
                score
            );
        }
        out
    }
}

impl TrialDistribution {
    /// Writes the CSV to a destination.
    pub fn write_csv(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }

    /// CSV with a metadata preamble and columns `trial,score`. Failures are
    /// recorded as comment lines so they never bias a histogram silently.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# seed={}", self.seed);
        let _ = writeln!(out, "# kind={}", kind_label(self.kind));
        let _ = writeln!(out, "# base_score={}", fmt_f64(self.base_score));
        for (trial, reason) in &self.failures {
            let _ = writeln!(out, "# failed trial={trial} reason={reason}");
        }
        out.push_str("trial,score\n");
        for (trial, score) in &self.scores {
            let _ = writeln!(out, "{trial},{}", fmt_f64(*score));
        }
        out
    }
}

fn kind_label(kind: TransformKind) -> &'static str {
    kind.as_str()
}

/// Parsed form of a trial CSV: the seed, the base score, and the
/// `(trial, score)` rows.
pub type ParsedTrialCsv = (u64, f64, Vec<(usize, f64)>);

/// Reads back a trial CSV produced by [`TrialDistribution::to_csv`].
/// Used to check round-trips.
pub fn parse_trial_csv(text: &str) -> Result<ParsedTrialCsv> {
    let mut seed = None;
    let mut base = None;
    let mut scores = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# seed=") {
            seed = rest.trim().parse::<u64>().ok();
        } else if let Some(rest) = line.strip_prefix("# base_score=") {
            base = rest.trim().parse::<f64>().ok();
        } else if line.starts_with('#') || line == "trial,score" || line.trim().is_empty() {
            continue;
        } else {
            let mut fields = line.splitn(2, ',');
            let trial = fields
                .next()
                .and_then(|f| f.parse::<usize>().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("bad trial row: {line}")))?;
            let score = fields
                .next()
                .and_then(|f| f.parse::<f64>().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("bad score row: {line}")))?;
            scores.push((trial, score));
        }
    }
    match (seed, base) {
        (Some(s), Some(b)) => Ok((s, b, scores)),
        _ => Err(Error::InvalidArgument("missing preamble".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::Matrix;

    fn synthetic_embedding(words: usize, d: usize, seed: u64) -> Embedding {
        let mut rng = SplitMix64::new(seed);
        let v = Matrix::from_fn(d, words, |_, _| rng.standard_normal());
        let vocab = (0..words).map(|i| format!("w{i}")).collect();
        Embedding::new(vocab, v).unwrap()
    }

    fn synthetic_testset(words: usize, pairs: usize, seed: u64) -> SimilarityTestSet {
        let mut rng = SplitMix64::new(seed);
        let mut list = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            let a = rng.uniform_index(words);
            let mut b = rng.uniform_index(words);
            while b == a {
                b = rng.uniform_index(words);
            }
            list.push((format!("w{a}"), format!("w{b}"), rng.uniform() * 10.0));
        }
        SimilarityTestSet::new("synthetic", list).unwrap()
    }

    #[test]
    fn sweep_alpha_zero_reproduces_base() {
        let emb = synthetic_embedding(20, 4, 1);
        let ts = synthetic_testset(20, 15, 2);
        let base = evaluate(&emb, &ts, Method::Spearman, OovPolicy::Skip).unwrap();
        let lambda = Transform::from_diagonal(&[0.3, 1.0, 2.5, 4.0]).unwrap();
        let sweep = alpha_sweep(
            &emb,
            &lambda,
            "test",
            &[-1.0, 0.0, 1.0],
            &[&ts],
            Method::Spearman,
        )
        .unwrap();
        let zero_row = &sweep.rows[1];
        assert_eq!(zero_row.alpha, 0.0);
        assert_eq!(*zero_row.score.as_ref().unwrap(), base.score);
    }

    #[test]
    fn sweep_scaled_identity_rows_are_constant() {
        let emb = synthetic_embedding(15, 3, 3);
        let ts = synthetic_testset(15, 10, 4);
        let lambda = Transform::new(
            Matrix::identity(3).scale(2.0),
            TransformKind::Diagonal,
        )
        .unwrap();
        let sweep = alpha_sweep(
            &emb,
            &lambda,
            "cI",
            &[-2.0, -1.0, 0.0, 1.0, 2.0],
            &[&ts],
            Method::Spearman,
        )
        .unwrap();
        let scores: Vec<f64> = sweep
            .rows
            .iter()
            .map(|r| *r.score.as_ref().unwrap())
            .collect();
        for s in &scores {
            assert!((s - scores[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_along_singular_values_produces_a_nonconstant_curve() {
        // A desk-scale factorized corpus swept along its own singular-value
        // diagonal: the score varies with alpha once the range is wide
        // enough, while every row stays individually reproducible.
        let mut rng = SplitMix64::new(90);
        let x = Matrix::from_fn(12, 20, |_, _| (rng.uniform() * 5.0).floor());
        let sol = crate::lsa::lsa_solve_matrix(&x, 4, 0.0).unwrap();
        let vocab: Vec<String> = (0..20).map(|i| format!("w{i}")).collect();
        let emb = Embedding::new(vocab, sol.pair.v.clone()).unwrap();
        let ts = synthetic_testset(20, 16, 91);
        let lambda = Transform::from_diagonal(&sol.singular_values).unwrap();
        let alphas: Vec<f64> = (-4..=4).map(f64::from).collect();
        let sweep = alpha_sweep(&emb, &lambda, "sigma", &alphas, &[&ts], Method::Spearman).unwrap();
        let scores: Vec<f64> = sweep
            .rows
            .iter()
            .map(|r| *r.score.as_ref().unwrap())
            .collect();
        assert!(
            scores.iter().any(|s| (s - scores[0]).abs() > 1e-9),
            "curve unexpectedly constant: {scores:?}"
        );
    }

    #[test]
    fn sweep_requires_increasing_alphas() {
        let emb = synthetic_embedding(10, 2, 5);
        let ts = synthetic_testset(10, 5, 6);
        let lambda = Transform::from_diagonal(&[1.0, 2.0]).unwrap();
        assert!(alpha_sweep(&emb, &lambda, "x", &[0.0, 0.0], &[&ts], Method::Spearman).is_err());
    }

    #[test]
    fn presets_have_expected_shapes() {
        let presets = lambda_presets(&[5.0, 3.0, 1.0], 7).unwrap();
        let names: Vec<&str> = presets.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, vec!["sigma", "linear", "uniform", "absnormal"]);
        let sigma = &presets[0].1;
        assert!(sigma
            .matrix()
            .max_abs_diff(&Matrix::from_diag(&[5.0, 3.0, 1.0]))
            < 1e-15);
        let linear = &presets[1].1;
        assert!(linear
            .matrix()
            .max_abs_diff(&Matrix::from_diag(&[1.0, 2.0, 3.0]))
            < 1e-15);
        for (_, t) in &presets {
            for i in 0..3 {
                assert!(t.matrix().get(i, i) > 0.0);
            }
        }
        // Determinism per seed.
        let again = lambda_presets(&[5.0, 3.0, 1.0], 7).unwrap();
        for (a, b) in presets.iter().zip(&again) {
            assert_eq!(a.1.matrix(), b.1.matrix());
        }
    }

    #[test]
    fn study_with_zero_runs_has_undefined_summary() {
        let emb = synthetic_embedding(12, 3, 8);
        let ts = synthetic_testset(12, 8, 9);
        let dist =
            random_transform_study(&emb, TransformKind::Diagonal, 0, 1, &ts, Method::Spearman)
                .unwrap();
        assert!(dist.scores.is_empty());
        assert!(dist.summary.is_none());
    }

    #[test]
    fn orthogonal_study_is_degenerate() {
        let emb = synthetic_embedding(25, 4, 10);
        let ts = synthetic_testset(25, 20, 11);
        let dist =
            random_transform_study(&emb, TransformKind::Orthogonal, 20, 3, &ts, Method::Spearman)
                .unwrap();
        assert_eq!(dist.scores.len(), 20);
        for &(_, s) in &dist.scores {
            assert!((s - dist.base_score).abs() < 1e-9);
        }
    }

    #[test]
    fn study_is_deterministic_per_seed() {
        let emb = synthetic_embedding(14, 3, 12);
        let ts = synthetic_testset(14, 10, 13);
        let a = random_transform_study(&emb, TransformKind::Diagonal, 15, 42, &ts, Method::Pearson)
            .unwrap();
        let b = random_transform_study(&emb, TransformKind::Diagonal, 15, 42, &ts, Method::Pearson)
            .unwrap();
        assert_eq!(a.scores, b.scores);
    }

    #[test]
    fn each_trial_is_reproducible_in_isolation() {
        // Re-deriving any single trial's transform from seed + index and
        // re-evaluating gives the stored score exactly.
        let emb = synthetic_embedding(18, 4, 60);
        let ts = synthetic_testset(18, 12, 61);
        let seed = 19;
        let dist =
            random_transform_study(&emb, TransformKind::UpperTriangular, 12, seed, &ts, Method::Spearman)
                .unwrap();
        for &(trial, stored) in &dist.scores {
            let mut rng = SplitMix64::new(seed.wrapping_add(trial as u64));
            let transform = sample_transform(TransformKind::UpperTriangular, 4, &mut rng);
            let v = transform.matrix().matmul(emb.v()).unwrap();
            let score = evaluate(&emb.with_v(v).unwrap(), &ts, Method::Spearman, OovPolicy::Skip)
                .unwrap()
                .score;
            assert_eq!(score, stored);
        }
    }

    #[test]
    fn summary_matches_recomputation() {
        let emb = synthetic_embedding(16, 3, 20);
        let ts = synthetic_testset(16, 12, 21);
        let dist =
            random_transform_study(&emb, TransformKind::Diagonal, 30, 5, &ts, Method::Spearman)
                .unwrap();
        let summary = dist.summary.unwrap();
        let recomputed = Summary::from_scores(&dist.score_values()).unwrap();
        assert!((summary.mean - recomputed.mean).abs() < 1e-12);
        assert!((summary.sd - recomputed.sd).abs() < 1e-12);
        assert_eq!(summary.min, recomputed.min);
        assert_eq!(summary.max, recomputed.max);
    }

    #[test]
    fn trial_csv_roundtrips_exactly() {
        let emb = synthetic_embedding(10, 3, 30);
        let ts = synthetic_testset(10, 8, 31);
        let dist =
            random_transform_study(&emb, TransformKind::Diagonal, 10, 77, &ts, Method::Spearman)
                .unwrap();
        let csv = dist.to_csv();
        let (seed, base, scores) = parse_trial_csv(&csv).unwrap();
        assert_eq!(seed, 77);
        assert_eq!(base, dist.base_score);
        assert_eq!(scores, dist.scores);
    }

    #[test]
    fn empty_distribution_emits_header_only_rows() {
        let dist = TrialDistribution {
            kind: TransformKind::Diagonal,
            scores: vec![],
            failures: vec![],
            base_score: 0.5,
            seed: 1,
            summary: None,
        };
        let csv = dist.to_csv();
        let data_lines: Vec<&str> = csv
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .collect();
        assert_eq!(data_lines, vec!["trial,score"]);
    }

    #[test]
    fn sweep_csv_has_one_line_per_row() {
        let emb = synthetic_embedding(10, 2, 40);
        let ts = synthetic_testset(10, 6, 41);
        let lambda = Transform::from_diagonal(&[1.0, 3.0]).unwrap();
        let sweep = alpha_sweep(
            &emb,
            &lambda,
            "lin",
            &[0.0, 0.5, 1.0],
            &[&ts],
            Method::Pearson,
        )
        .unwrap();
        let csv = sweep.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "alpha,lambda,testset,method,score");
        // Rows parse back to the stored scores exactly.
        for (line, row) in lines[1..].iter().zip(&sweep.rows) {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields[0].parse::<f64>().unwrap(), row.alpha);
            assert_eq!(
                fields[4].parse::<f64>().unwrap(),
                *row.score.as_ref().unwrap()
            );
        }
    }
}
