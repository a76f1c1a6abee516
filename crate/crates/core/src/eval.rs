//! Task evaluation: cosine similarity of word vectors scored against
//! human-assigned similarity judgements with Spearman or Pearson correlation.
//!
//! Scores are invariant under scaled-orthogonal maps of the embedding and
//! under nothing larger; that asymmetry against the full gauge group is the
//! reason the rest of this crate exists.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::Matrix;

/// Norm threshold below which a vector counts as zero for cosine purposes.
pub const ZERO_TOL: f64 = 1e-12;

/// An ordered vocabulary with word vectors as the columns of `V` (d x p).
/// `U` tags along when the producing factorization kept it.
#[derive(Debug, Clone)]
pub struct Embedding {
    vocab: Vec<String>,
    v: Matrix,
    u: Option<Matrix>,
    /// Lookup on the lowercased form; first occurrence wins.
    index: HashMap<String, usize>,
}

impl Embedding {
    pub fn new(vocab: Vec<String>, v: Matrix) -> Result<Self> {
        if vocab.len() != v.cols() {
            return Err(Error::ShapeMismatch(format!(
                "{} words but V has {} columns",
                vocab.len(),
                v.cols()
            )));
        }
        let mut index = HashMap::with_capacity(vocab.len());
        for (j, word) in vocab.iter().enumerate() {
            if index.contains_key(word) {
                return Err(Error::InvalidArgument(format!(
                    "duplicate word in vocabulary: {word}"
                )));
            }
            index.insert(word.clone(), j);
        }
        // Case-insensitive lookup table; ties go to the earliest entry.
        let mut lower_index = HashMap::with_capacity(vocab.len());
        for (j, word) in vocab.iter().enumerate() {
            lower_index.entry(word.to_lowercase()).or_insert(j);
        }
        Ok(Self {
            vocab,
            v,
            u: None,
            index: lower_index,
        })
    }

    pub fn with_u(mut self, u: Matrix) -> Result<Self> {
        if u.cols() != self.v.rows() {
            return Err(Error::ShapeMismatch(format!(
                "U has {} columns, V has {} rows",
                u.cols(),
                self.v.rows()
            )));
        }
        self.u = Some(u);
        Ok(self)
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn u(&self) -> Option<&Matrix> {
        self.u.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.v.rows()
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    /// Column index for a word; both sides are matched lowercased.
    pub fn lookup(&self, word: &str) -> Option<usize> {
        self.index.get(&word.to_lowercase()).copied()
    }

    /// The vector of column `j`.
    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.v.col(j)
    }

    /// Same vocabulary with a replaced `V`; `U` is dropped because a bare
    /// matrix substitution has no paired context matrix.
    pub fn with_v(&self, v: Matrix) -> Result<Self> {
        if v.cols() != self.vocab.len() {
            return Err(Error::ShapeMismatch(format!(
                "replacement V has {} columns for {} words",
                v.cols(),
                self.vocab.len()
            )));
        }
        Ok(Self {
            vocab: self.vocab.clone(),
            v,
            u: None,
            index: self.index.clone(),
        })
    }
}

/// Word pairs with human similarity scores.
#[derive(Debug, Clone)]
pub struct SimilarityTestSet {
    pub name: String,
    pub pairs: Vec<(String, String, f64)>,
}

impl SimilarityTestSet {
    pub fn new(name: impl Into<String>, pairs: Vec<(String, String, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidArgument("test set has no pairs".into()));
        }
        if pairs.iter().any(|p| !p.2.is_finite()) {
            return Err(Error::NonFiniteEntries("human scores"));
        }
        Ok(Self {
            name: name.into(),
            pairs,
        })
    }

    /// Parses the text format: one pair per line, `word1 SEP word2 SEP score`
    /// with tab or comma separators. Lines starting with `#` are skipped, and
    /// a single leading header line is tolerated when its third field is not
    /// numeric. Errors carry 1-based line numbers.
    pub fn parse(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut saw_data = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = if line.contains('\t') {
                line.split('\t').collect()
            } else {
                line.split(',').collect()
            };
            if fields.len() != 3 {
                return Err(Error::InvalidArgument(format!(
                    "line {}: expected 3 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            match fields[2].trim().parse::<f64>() {
                Ok(score) if score.is_finite() => {
                    pairs.push((
                        fields[0].trim().to_owned(),
                        fields[1].trim().to_owned(),
                        score,
                    ));
                    saw_data = true;
                }
                _ if !saw_data => {
                    // Header line: non-numeric third field before any data.
                    saw_data = true;
                }
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "line {}: third field `{}` is not a number",
                        lineno + 1,
                        fields[2]
                    )));
                }
            }
        }
        Self::new(name, pairs)
    }
}

/// Correlation flavor used to score an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Spearman,
    Pearson,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Spearman => "spearman",
            Method::Pearson => "pearson",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spearman" => Ok(Method::Spearman),
            "pearson" => Ok(Method::Pearson),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected spearman or pearson)"
            ))),
        }
    }
}

/// How out-of-vocabulary pairs are handled. Skipped pairs are counted so
/// scores over different vocabularies stay interpretable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OovPolicy {
    #[default]
    Skip,
}

/// Outcome of evaluating one embedding against one test set.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub testset: String,
    pub method: Method,
    pub score: f64,
    pub pairs_used: usize,
    pub pairs_skipped_oov: usize,
    pub pairs_skipped_zero: usize,
}

/// Cosine similarity, clamped into `[-1, 1]` to absorb rounding at the ends.
pub fn cosine(v1: &[f64], v2: &[f64]) -> Result<f64> {
    if v1.len() != v2.len() {
        return Err(Error::LengthMismatch {
            left: v1.len(),
            right: v2.len(),
        });
    }
    let (mut dot, mut n1, mut n2) = (0.0, 0.0, 0.0);
    for (a, b) in v1.iter().zip(v2) {
        dot += a * b;
        n1 += a * a;
        n2 += b * b;
    }
    let (n1, n2) = (n1.sqrt(), n2.sqrt());
    if n1 <= ZERO_TOL || n2 <= ZERO_TOL {
        return Err(Error::ZeroVector(ZERO_TOL));
    }
    Ok((dot / (n1 * n2)).clamp(-1.0, 1.0))
}

/// Average ranks, with ties getting the mean of their rank range.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // Positions i..=j share the same value: average rank (1-based).
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn check_correlation_input(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::ConstantInput);
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(x) || constant(y) {
        return Err(Error::ConstantInput);
    }
    Ok(())
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_correlation_input(x, y)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman rank correlation: Pearson on average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_correlation_input(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

/// Scores `emb` against the test set: cosine per resolvable pair, then the
/// chosen correlation against the human scores. Out-of-vocabulary pairs and
/// zero-vector pairs are skipped and counted separately.
pub fn evaluate(
    emb: &Embedding,
    testset: &SimilarityTestSet,
    method: Method,
    _oov: OovPolicy,
) -> Result<EvalReport> {
    let mut model_scores = Vec::with_capacity(testset.pairs.len());
    let mut human_scores = Vec::with_capacity(testset.pairs.len());
    let mut oov = 0usize;
    let mut zero = 0usize;
    for (w1, w2, human) in &testset.pairs {
        let (Some(j1), Some(j2)) = (emb.lookup(w1), emb.lookup(w2)) else {
            oov += 1;
            continue;
        };
        match cosine(&emb.vector(j1), &emb.vector(j2)) {
            Ok(c) => {
                model_scores.push(c);
                human_scores.push(*human);
            }
            Err(Error::ZeroVector(_)) => zero += 1,
            Err(e) => return Err(e),
        }
    }
    if model_scores.len() < 2 {
        return Err(Error::TooFewPairs {
            usable: model_scores.len(),
            needed: 2,
        });
    }
    let score = match method {
        Method::Spearman => spearman(&model_scores, &human_scores)?,
        Method::Pearson => pearson(&model_scores, &human_scores)?,
    };
    Ok(EvalReport {
        testset: testset.name.clone(),
        method,
        score,
        pairs_used: model_scores.len(),
        pairs_skipped_oov: oov,
        pairs_skipped_zero: zero,
    })
}
