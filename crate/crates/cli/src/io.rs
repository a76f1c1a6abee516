//! Text IO for embeddings, context matrices, and test sets.
//!
//! Embedding files follow the two dominant pretrained-vector layouts:
//! the headered form (first line `vocab_count dim`, then `word v1 .. vd` per
//! line) and the headerless form with the same row shape. Pretrained files
//! therefore load unmodified. Numbers are written with 17 significant digits
//! so save/load round-trips are exact in binary64.

use std::fs;
use std::path::Path;

use gaugeword::eval::{Embedding, SimilarityTestSet};
use gaugeword::matcore::Matrix;

use crate::error::CliError;

/// Embedding text layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbeddingFormat {
    /// Detect the header: present when the first line is exactly two
    /// integer tokens.
    Auto,
    /// Headered `vocab_count dim` first line.
    Word2vec,
    /// Headerless rows.
    Glove,
}

/// Counters from a load: rows dropped as duplicates of an earlier word.
#[derive(Debug, Clone, Copy, Default)]
pub struct LoadStats {
    pub duplicate_words: usize,
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Loads an embedding text file. Vocabulary order is file order; the vector
/// dimension is fixed by the first data row (and the header, when present).
/// Duplicate words keep their first occurrence and are counted.
pub fn load_embedding_text(
    path: &Path,
    format: EmbeddingFormat,
) -> Result<(Embedding, LoadStats), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate().peekable();

    let header = match format {
        EmbeddingFormat::Glove => None,
        EmbeddingFormat::Word2vec | EmbeddingFormat::Auto => {
            let header = lines.peek().and_then(|&(_, line)| parse_header(line));
            if header.is_none() && format == EmbeddingFormat::Word2vec {
                return Err(CliError::MalformedLine {
                    path: path_str,
                    line: 1,
                    detail: "expected header `vocab_count dim`".into(),
                });
            }
            if header.is_some() {
                lines.next();
            }
            header
        }
    };

    let mut vocab: Vec<String> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut dim: Option<usize> = header.map(|(_, d)| d);
    let mut stats = LoadStats::default();

    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let word = fields
            .next()
            .ok_or_else(|| CliError::MalformedLine {
                path: path_str.clone(),
                line: lineno,
                detail: "empty row".into(),
            })?
            .to_owned();
        let mut values = Vec::new();
        for field in fields {
            let value: f64 = field.parse().map_err(|_| CliError::MalformedLine {
                path: path_str.clone(),
                line: lineno,
                detail: format!("`{field}` is not a number"),
            })?;
            if !value.is_finite() {
                return Err(CliError::MalformedLine {
                    path: path_str.clone(),
                    line: lineno,
                    detail: format!("non-finite value `{field}`"),
                });
            }
            values.push(value);
        }
        if values.is_empty() {
            return Err(CliError::MalformedLine {
                path: path_str.clone(),
                line: lineno,
                detail: "row has a word but no vector".into(),
            });
        }
        match dim {
            None => dim = Some(values.len()),
            Some(d) if d != values.len() => {
                return Err(CliError::MalformedLine {
                    path: path_str.clone(),
                    line: lineno,
                    detail: format!("expected {d} vector values, found {}", values.len()),
                });
            }
            Some(_) => {}
        }
        if vocab.contains(&word) {
            stats.duplicate_words += 1;
            continue;
        }
        vocab.push(word);
        rows.push(values);
    }

    if rows.is_empty() {
        return Err(CliError::EmptyEmbedding { path: path_str });
    }
    if let Some((count, _)) = header {
        if count != rows.len() + stats.duplicate_words {
            return Err(CliError::DimensionMismatch {
                path: path_str,
                line: 1,
                expected: count,
                got: rows.len() + stats.duplicate_words,
            });
        }
    }

    // File rows are word vectors; V stores them as columns (d x p).
    let d = dim.expect("dim fixed by first row");
    let p = rows.len();
    let v = Matrix::from_fn(d, p, |i, j| rows[j][i]);
    let embedding = Embedding::new(vocab, v)?;
    Ok((embedding, stats))
}

fn parse_header(line: &str) -> Option<(usize, usize)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return None;
    }
    match (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
        (Ok(count), Ok(dim)) => Some((count, dim)),
        _ => None,
    }
}

/// Writes an embedding as text; `Auto` behaves as headerless.
pub fn save_embedding_text(
    emb: &Embedding,
    path: &Path,
    format: EmbeddingFormat,
) -> Result<(), CliError> {
    let mut out = String::new();
    if format == EmbeddingFormat::Word2vec {
        out.push_str(&format!("{} {}\n", emb.len(), emb.dim()));
    }
    for (j, word) in emb.vocab().iter().enumerate() {
        out.push_str(word);
        for i in 0..emb.dim() {
            out.push(' ');
            out.push_str(&fmt17(emb.v().get(i, j)));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Loads a plain numeric matrix: one row per line, whitespace-separated.
/// Used for context matrices, which carry no vocabulary.
pub fn load_matrix_text(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text, path, &[' ', '\t'])
}

/// Writes a plain numeric matrix, one row per line, 17 significant digits.
pub fn save_matrix_text(m: &Matrix, path: &Path) -> Result<(), CliError> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|&x| fmt17(x)).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

/// Loads a comma-separated numeric matrix (for `--matrix` and lambda files).
pub fn load_matrix_csv(path: &Path) -> Result<Matrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text, path, &[','])
}

fn parse_matrix(text: &str, path: &Path, separators: &[char]) -> Result<Matrix, CliError> {
    let path_str = path.display().to_string();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut values = Vec::new();
        for field in line.split(separators).filter(|f| !f.trim().is_empty()) {
            let value: f64 = field.trim().parse().map_err(|_| CliError::MalformedLine {
                path: path_str.clone(),
                line: lineno,
                detail: format!("`{field}` is not a number"),
            })?;
            values.push(value);
        }
        if let Some(first) = rows.first() {
            if values.len() != first.len() {
                return Err(CliError::MalformedLine {
                    path: path_str.clone(),
                    line: lineno,
                    detail: format!("expected {} values, found {}", first.len(), values.len()),
                });
            }
        }
        rows.push(values);
    }
    if rows.is_empty() {
        return Err(CliError::MalformedLine {
            path: path_str,
            line: 1,
            detail: "no rows".into(),
        });
    }
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Ok(Matrix::from_rows(&refs)?)
}

/// Loads a similarity test set, named after the file stem.
pub fn load_testset(path: &Path) -> Result<SimilarityTestSet, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "testset".to_owned());
    Ok(SimilarityTestSet::parse(name, &text)?)
}
