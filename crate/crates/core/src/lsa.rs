//! Corpus ingestion and the least-squares embedding model: a document-term
//! matrix factored by truncated SVD, with the exponent-indexed family of
//! equally optimal factor pairs `U = A_d S^a`, `V = S^(1-a) B_d^T`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gauge::FactorPair;
use crate::matcore::{svd_thin, Matrix};

/// A corpus as an ordered list of tokenized documents.
#[derive(Debug, Clone, Default)]
pub struct TokenizedCorpus {
    pub documents: Vec<Vec<String>>,
}

impl TokenizedCorpus {
    /// Tokenizes one document per line of `text`.
    pub fn from_text(text: &str) -> Self {
        Self {
            documents: text.lines().map(tokenize).collect(),
        }
    }
}

/// Lowercases and splits on maximal runs of non-alphanumeric characters,
/// dropping empty tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Document-term count matrix over an ordered vocabulary.
///
/// Row `i` counts the words of document `i`; column `j` corresponds to
/// `vocab[j]`. The vocabulary is sorted by descending total count with
/// lexicographic tie-breaking, so builds are reproducible.
#[derive(Debug, Clone)]
pub struct DocTermMatrix {
    pub vocab: Vec<String>,
    pub matrix: Matrix,
}

/// Builds the document-term matrix, keeping words with total count at least
/// `min_count` and truncating to the `max_vocab` most frequent.
pub fn build_doc_term(
    corpus: &TokenizedCorpus,
    min_count: usize,
    max_vocab: usize,
) -> Result<DocTermMatrix> {
    if min_count < 1 {
        return Err(Error::InvalidArgument("min_count must be at least 1".into()));
    }
    if max_vocab < 1 {
        return Err(Error::InvalidArgument("max_vocab must be at least 1".into()));
    }
    let mut totals: HashMap<&str, usize> = HashMap::new();
    for doc in &corpus.documents {
        for tok in doc {
            *totals.entry(tok.as_str()).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = totals
        .into_iter()
        .filter(|&(_, count)| count >= min_count)
        .collect();
    // Descending count, then lexicographic, so truncation is deterministic.
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(max_vocab);
    if ranked.is_empty() {
        return Err(Error::EmptyVocabulary);
    }

    let vocab: Vec<String> = ranked.iter().map(|&(w, _)| w.to_owned()).collect();
    let index: HashMap<&str, usize> = vocab
        .iter()
        .enumerate()
        .map(|(j, w)| (w.as_str(), j))
        .collect();

    let n = corpus.documents.len();
    if n == 0 {
        return Err(Error::InvalidArgument("corpus has no documents".into()));
    }
    let mut matrix = Matrix::zeros(n, vocab.len());
    for (i, doc) in corpus.documents.iter().enumerate() {
        for tok in doc {
            if let Some(&j) = index.get(tok.as_str()) {
                matrix.set(i, j, matrix.get(i, j) + 1.0);
            }
        }
    }
    Ok(DocTermMatrix { vocab, matrix })
}

impl DocTermMatrix {
    /// CSV export: a header row of vocabulary words, then one count row per
    /// document. Counts are integers and round-trip exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.vocab.join(","));
        out.push('\n');
        for i in 0..self.matrix.rows() {
            let row: Vec<String> = self
                .matrix
                .row(i)
                .iter()
                .map(|&c| format!("{}", c as u64))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A rank-`d` solution of the factorization objective, along with the
/// leading singular values it was built from.
#[derive(Debug, Clone)]
pub struct LsaSolution {
    pub pair: FactorPair,
    /// Top `d` singular values, descending.
    pub singular_values: Vec<f64>,
    /// Set when `sigma_d / sigma_1 < 1e-10`: the trailing direction is close
    /// to degenerate and gauge statements become numerically fragile.
    pub spectrum_warning: bool,
}

/// Solves `min ||X - UV||_F` over rank-`d` factorizations and returns the
/// solution-set member indexed by `alpha`:
/// `U = A_d Sigma_d^alpha`, `V = Sigma_d^(1-alpha) B_d^T`.
///
/// The product `UV` is the same for every `alpha`. Refuses inputs whose
/// `d`-th singular value is exactly zero: there the rank-`d` solution set is
/// strictly larger than one GL(d) orbit and the gauge analysis downstream
/// does not apply.
pub fn lsa_solve(x: &DocTermMatrix, d: usize, alpha: f64) -> Result<LsaSolution> {
    lsa_solve_matrix(&x.matrix, d, alpha)
}

/// As [`lsa_solve`], on a raw matrix.
pub fn lsa_solve_matrix(x: &Matrix, d: usize, alpha: f64) -> Result<LsaSolution> {
    let (a_d, sigma_d, b_d) = svd_thin(x, d)?;
    let sigma: Vec<f64> = sigma_d.diagonal();
    if sigma[d - 1] == 0.0 {
        return Err(Error::DegenerateSpectrum { rank: d });
    }
    let spectrum_warning = sigma[d - 1] / sigma[0] < 1e-10;

    let sigma_alpha = Matrix::from_diag(&sigma.iter().map(|s| s.powf(alpha)).collect::<Vec<_>>());
    let sigma_rest =
        Matrix::from_diag(&sigma.iter().map(|s| s.powf(1.0 - alpha)).collect::<Vec<_>>());
    let u = a_d.matmul(&sigma_alpha)?;
    let v = sigma_rest.matmul(&b_d.transpose())?;
    if !u.is_finite() || !v.is_finite() {
        return Err(Error::NonFiniteEntries("powered singular values"));
    }
    Ok(LsaSolution {
        pair: FactorPair::new(u, v)?,
        singular_values: sigma,
        spectrum_warning,
    })
}

/// Frobenius reconstruction error `||X - UV||_F`.
pub fn reconstruction_error(x: &Matrix, pair: &FactorPair) -> Result<f64> {
    let product = pair.product()?;
    if product.rows() != x.rows() || product.cols() != x.cols() {
        return Err(Error::ShapeMismatch(format!(
            "product is {}x{}, corpus matrix is {}x{}",
            product.rows(),
            product.cols(),
            x.rows(),
            x.cols()
        )));
    }
    Ok(x.sub(&product)?.frobenius_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{sym_eig_desc, SplitMix64};

    #[test]
    fn tokenize_examples() {
        assert_eq!(tokenize("The cat, the CAT."), vec!["the", "cat", "the", "cat"]);
        assert_eq!(tokenize(""), Vec::<String>::new());
        assert_eq!(tokenize("word2vec-style"), vec!["word2vec", "style"]);
    }

    fn toy_corpus() -> TokenizedCorpus {
        TokenizedCorpus {
            documents: vec![
                vec!["a".into(), "b".into()],
                vec!["a".into()],
            ],
        }
    }

    #[test]
    fn build_doc_term_basic() {
        let dtm = build_doc_term(&toy_corpus(), 1, 100).unwrap();
        assert_eq!(dtm.vocab, vec!["a", "b"]);
        let expect = Matrix::from_rows(&[&[1.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(dtm.matrix, expect);
    }

    #[test]
    fn build_doc_term_min_count_filters() {
        let dtm = build_doc_term(&toy_corpus(), 2, 100).unwrap();
        assert_eq!(dtm.vocab, vec!["a"]);
        let expect = Matrix::from_rows(&[&[1.0], &[1.0]]).unwrap();
        assert_eq!(dtm.matrix, expect);
    }

    #[test]
    fn build_doc_term_empty_document_gives_zero_row() {
        let corpus = TokenizedCorpus {
            documents: vec![vec!["a".into()], vec![], vec!["a".into()]],
        };
        let dtm = build_doc_term(&corpus, 1, 10).unwrap();
        assert_eq!(dtm.matrix.row(1), &[0.0]);
    }

    #[test]
    fn build_doc_term_rejects_filtered_out_vocab() {
        assert!(matches!(
            build_doc_term(&toy_corpus(), 5, 100),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn build_doc_term_is_order_stable_under_doc_permutation() {
        let corpus = TokenizedCorpus {
            documents: vec![
                tokenize("b b c"),
                tokenize("a a a"),
                tokenize("c a"),
            ],
        };
        let permuted = TokenizedCorpus {
            documents: vec![
                corpus.documents[2].clone(),
                corpus.documents[0].clone(),
                corpus.documents[1].clone(),
            ],
        };
        let dtm = build_doc_term(&corpus, 1, 10).unwrap();
        let dtm_p = build_doc_term(&permuted, 1, 10).unwrap();
        assert_eq!(dtm.vocab, dtm_p.vocab);
        assert_eq!(dtm.matrix.row(0), dtm_p.matrix.row(1));
        assert_eq!(dtm.matrix.row(1), dtm_p.matrix.row(2));
        assert_eq!(dtm.matrix.row(2), dtm_p.matrix.row(0));
    }

    #[test]
    fn lsa_alpha_zero_on_diagonal_input() {
        let x = Matrix::from_diag(&[3.0, 2.0, 1.0]);
        let sol = lsa_solve_matrix(&x, 2, 0.0).unwrap();
        assert!((sol.singular_values[0] - 3.0).abs() < 1e-12);
        assert!((sol.singular_values[1] - 2.0).abs() < 1e-12);
        // V rows are orthogonal with norms 3 and 2.
        let v = &sol.pair.v;
        let gram = v.matmul(&v.transpose()).unwrap();
        assert!((gram.get(0, 0) - 9.0).abs() < 1e-10);
        assert!((gram.get(1, 1) - 4.0).abs() < 1e-10);
        assert!(gram.get(0, 1).abs() < 1e-10);
        // U has orthonormal columns at alpha = 0.
        let u = &sol.pair.u;
        let utu = u.transpose().matmul(u).unwrap();
        assert!(utu.max_abs_diff(&Matrix::identity(2)) < 1e-10);
    }

    #[test]
    fn lsa_product_is_alpha_independent() {
        let mut rng = SplitMix64::new(77);
        let x = Matrix::from_fn(7, 5, |_, _| (rng.uniform() * 6.0).floor());
        let base = lsa_solve_matrix(&x, 3, 0.0).unwrap().pair.product().unwrap();
        for &alpha in &[0.25, 0.5, 1.0] {
            let sol = lsa_solve_matrix(&x, 3, alpha).unwrap();
            let prod = sol.pair.product().unwrap();
            assert!(prod.max_abs_diff(&base) < 1e-9, "alpha = {alpha}");
        }
    }

    #[test]
    fn lsa_refuses_exact_zero_trailing_singular_value() {
        let x = Matrix::from_diag(&[1.0, 0.0]);
        assert!(matches!(
            lsa_solve_matrix(&x, 2, 0.0),
            Err(Error::DegenerateSpectrum { rank: 2 })
        ));
    }

    #[test]
    fn reconstruction_error_examples() {
        // Exact factorization has zero error.
        let x = Matrix::from_diag(&[2.0, 1.0]);
        let sol = lsa_solve_matrix(&x, 2, 0.0).unwrap();
        assert!(reconstruction_error(&x, &sol.pair).unwrap() < 1e-12);

        // Dropping sigma_3 = 1 from diag(3,2,1) costs exactly 1.
        let x = Matrix::from_diag(&[3.0, 2.0, 1.0]);
        let sol = lsa_solve_matrix(&x, 2, 0.0).unwrap();
        assert!((reconstruction_error(&x, &sol.pair).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reconstruction_error_matches_discarded_spectrum() {
        let mut rng = SplitMix64::new(5);
        let x = Matrix::from_fn(8, 6, |_, _| rng.standard_normal());
        let d = 3;
        let sol = lsa_solve_matrix(&x, d, 0.3).unwrap();
        let err = reconstruction_error(&x, &sol.pair).unwrap();
        // Independent route: tail eigenvalues of X^T X.
        let (_, lambda) = sym_eig_desc(&x.transpose().matmul(&x).unwrap()).unwrap();
        let tail: f64 = lambda.diagonal()[d..].iter().map(|l| l.max(0.0)).sum();
        assert!((err - tail.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn reconstruction_error_shape_mismatch() {
        let x = Matrix::from_diag(&[1.0, 2.0]);
        let sol = lsa_solve_matrix(&Matrix::from_diag(&[1.0, 2.0, 3.0]), 2, 0.0).unwrap();
        assert!(matches!(
            reconstruction_error(&x, &sol.pair),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn lsa_beats_random_factorizations() {
        let mut rng = SplitMix64::new(31);
        let x = Matrix::from_fn(6, 5, |_, _| (rng.uniform() * 4.0).floor());
        for d in 1..=3 {
            let best = lsa_solve_matrix(&x, d, 0.0).unwrap();
            let opt_err = reconstruction_error(&x, &best.pair).unwrap();
            for _ in 0..50 {
                let u = Matrix::from_fn(6, d, |_, _| rng.standard_normal());
                let v = Matrix::from_fn(d, 5, |_, _| rng.standard_normal());
                let pair = FactorPair::new(u, v).unwrap();
                let err = reconstruction_error(&x, &pair).unwrap();
                assert!(err + 1e-12 >= opt_err);
            }
        }
    }

    #[test]
    fn csv_export_header_and_rows() {
        let dtm = build_doc_term(&toy_corpus(), 1, 10).unwrap();
        let csv = dtm.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines, vec!["a,b", "1,1", "1,0"]);
    }
}
