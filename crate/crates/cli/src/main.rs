//! `gaugeword`: build, transform, canonicalize, and evaluate word-embedding
//! factor pairs from the command line.
//!
//! Every subcommand that writes files also writes a `<output>.manifest.json`
//! with the command line, seed, and content digests of inputs and outputs.
//! Seeded subcommands are byte-deterministic: same inputs and seed, same
//! output bytes. `GAUGEWORD_SEED` supplies the default seed when `--seed` is
//! absent.

mod error;
mod io;
mod manifest;

use std::env;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gaugeword::eval::{evaluate, Embedding, EvalReport, Method, OovPolicy};
use gaugeword::explore::{alpha_sweep, lambda_presets, random_transform_study};
use gaugeword::gauge::{canonicalize, sum_tie, symmetric_tie, whiten, FactorPair};
use gaugeword::lsa::{build_doc_term, lsa_solve, TokenizedCorpus};
use gaugeword::matcore::{
    sample_transform, singular_values, Matrix, SplitMix64, Transform, TransformKind,
};
use gaugeword::optimize::{cross_validated_optimize, optimize_diag, OptimizerOptions};

use error::CliError;
use io::{
    load_embedding_text, load_matrix_csv, load_matrix_text, load_testset, save_embedding_text,
    save_matrix_text, EmbeddingFormat,
};
use manifest::ManifestBuilder;

#[derive(Parser)]
#[command(name = "gaugeword", version, about = "Gauge transforms, canonical forms, and similarity-task evaluation for word embeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Auto,
    Word2vec,
    Glove,
}

impl From<FormatArg> for EmbeddingFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Auto => EmbeddingFormat::Auto,
            FormatArg::Word2vec => EmbeddingFormat::Word2vec,
            FormatArg::Glove => EmbeddingFormat::Glove,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Diagonal,
    Upper,
    Orthogonal,
    General,
}

impl From<KindArg> for TransformKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Diagonal => TransformKind::Diagonal,
            KindArg::Upper => TransformKind::UpperTriangular,
            KindArg::Orthogonal => TransformKind::Orthogonal,
            KindArg::General => TransformKind::General,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum StudyKindArg {
    Diagonal,
    Upper,
    Orthogonal,
}

impl From<StudyKindArg> for TransformKind {
    fn from(k: StudyKindArg) -> Self {
        match k {
            StudyKindArg::Diagonal => TransformKind::Diagonal,
            StudyKindArg::Upper => TransformKind::UpperTriangular,
            StudyKindArg::Orthogonal => TransformKind::Orthogonal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Spearman,
    Pearson,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Spearman => Method::Spearman,
            MethodArg::Pearson => Method::Pearson,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OovArg {
    Skip,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieModeArg {
    Solve,
    Sum,
}

#[derive(Subcommand)]
enum Command {
    /// Build an embedding from a plain-text corpus (one document per line).
    BuildLsa {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        min_count: usize,
        #[arg(long, default_value_t = 5000)]
        max_vocab: usize,
        #[arg(long)]
        out_v: PathBuf,
        #[arg(long)]
        out_u: Option<PathBuf>,
        /// Also export the document-term count matrix as CSV.
        #[arg(long)]
        out_dtm: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Glove)]
        format: FormatArg,
    },
    /// Apply a gauge transform: V -> C V (and U -> U C^{-1} when U is given).
    Transform {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        u: Option<PathBuf>,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        out_u: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Glove)]
        format: FormatArg,
    },
    /// Canonicalize a factor pair to the unique constrained representative.
    Canonicalize {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        out_v: PathBuf,
        #[arg(long)]
        out_u: PathBuf,
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Glove)]
        format: FormatArg,
    },
    /// Impose V V^T = I using V alone.
    Whiten {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Glove)]
        format: FormatArg,
    },
    /// Resolve the symmetric-corpus tie between contexts and words.
    Tie {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long, value_enum)]
        mode: TieModeArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Glove)]
        format: FormatArg,
    },
    /// Score an embedding against a similarity test set.
    Evaluate {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        testset: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long, value_enum, default_value_t = OovArg::Skip)]
        oov: OovArg,
    },
    /// Sweep scores along V = Lambda^alpha V*.
    SweepAlpha {
        #[arg(long)]
        v: PathBuf,
        /// One of sigma|linear|uniform|absnormal or file:PATH (CSV diagonal).
        #[arg(long)]
        lambda: String,
        /// Grid as start:end:step, inclusive of both ends.
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        #[arg(long)]
        testset: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score distribution under random gauge transforms.
    StudyRandom {
        #[arg(long)]
        v: PathBuf,
        #[arg(long, value_enum)]
        kind: StudyKindArg,
        #[arg(long)]
        runs: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        testset: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Maximize the task score over positive diagonal transforms.
    OptimizeDiag {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        testset: PathBuf,
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(long)]
        kfold: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn command_line() -> String {
    env::args().collect::<Vec<_>>().join(" ")
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        env::var("GAUGEWORD_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn read_input(manifest: &mut ManifestBuilder, path: &Path) -> Result<Vec<u8>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    manifest.record_input(path, &bytes);
    Ok(bytes)
}

fn load_embedding_tracked(
    manifest: &mut ManifestBuilder,
    path: &Path,
    format: EmbeddingFormat,
) -> Result<Embedding, CliError> {
    read_input(manifest, path)?;
    let (emb, stats) = load_embedding_text(path, format)?;
    if stats.duplicate_words > 0 {
        eprintln!(
            "warning: {}: {} duplicate word(s) dropped, first occurrence kept",
            path.display(),
            stats.duplicate_words
        );
    }
    Ok(emb)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::BuildLsa {
            corpus,
            dim,
            alpha,
            min_count,
            max_vocab,
            out_v,
            out_u,
            out_dtm,
            format,
        } => {
            let mut manifest = ManifestBuilder::new(command_line(), None);
            let bytes = read_input(&mut manifest, &corpus)?;
            let text = String::from_utf8_lossy(&bytes);
            let tokenized = TokenizedCorpus::from_text(&text);
            let dtm = build_doc_term(&tokenized, min_count, max_vocab)?;
            if let Some(out_dtm) = &out_dtm {
                fs::write(out_dtm, dtm.to_csv()).map_err(|e| CliError::io(out_dtm, e))?;
                manifest.record_output(out_dtm);
            }
            let solution = lsa_solve(&dtm, dim, alpha)?;
            if solution.spectrum_warning {
                eprintln!(
                    "warning: trailing singular value ratio below 1e-10; solution set is nearly degenerate"
                );
            }
            let emb = Embedding::new(dtm.vocab.clone(), solution.pair.v.clone())?;
            save_embedding_text(&emb, &out_v, format.into())?;
            manifest.record_output(&out_v);
            if let Some(out_u) = &out_u {
                save_matrix_text(&solution.pair.u, out_u)?;
                manifest.record_output(out_u);
            }
            manifest.write()
        }

        Command::Transform {
            v,
            u,
            kind,
            seed,
            matrix,
            out,
            out_u,
            format,
        } => {
            if matrix.is_some() && seed.is_some() {
                return Err(CliError::Usage(
                    "--seed and --matrix are mutually exclusive".into(),
                ));
            }
            if u.is_some() != out_u.is_some() {
                return Err(CliError::Usage(
                    "--u and --out-u must be given together".into(),
                ));
            }
            let mut manifest = ManifestBuilder::new(command_line(), seed);
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            let d = emb.dim();
            let transform = match &matrix {
                Some(path) => {
                    read_input(&mut manifest, path)?;
                    Transform::new(load_matrix_csv(path)?, kind.into())?
                }
                None => {
                    let seed = resolve_seed(seed);
                    sample_transform(kind.into(), d, &mut SplitMix64::new(seed))
                }
            };
            if transform.dim() != d {
                return Err(CliError::Usage(format!(
                    "transform is {0}x{0} but the embedding dimension is {d}",
                    transform.dim()
                )));
            }

            match u {
                Some(u_path) => {
                    read_input(&mut manifest, &u_path)?;
                    let u_matrix = load_matrix_text(&u_path)?;
                    let pair = FactorPair::new(u_matrix, emb.v().clone())?;
                    let moved = gaugeword::gauge::apply_transform(&transform, &pair)?;
                    let out_emb = emb.with_v(moved.v)?;
                    save_embedding_text(&out_emb, &out, format.into())?;
                    manifest.record_output(&out);
                    let out_u = out_u.expect("checked above");
                    save_matrix_text(&moved.u, &out_u)?;
                    manifest.record_output(&out_u);
                }
                None => {
                    let moved = transform.matrix().matmul(emb.v())?;
                    let out_emb = emb.with_v(moved)?;
                    save_embedding_text(&out_emb, &out, format.into())?;
                    manifest.record_output(&out);
                }
            }
            manifest.write()
        }

        Command::Canonicalize {
            v,
            u,
            out_v,
            out_u,
            report,
            format,
        } => {
            let mut manifest = ManifestBuilder::new(command_line(), None);
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            read_input(&mut manifest, &u)?;
            let u_matrix = load_matrix_text(&u)?;
            let pair = FactorPair::new(u_matrix, emb.v().clone())?;
            let canon = canonicalize(&pair)?;

            let product_before = pair.product()?;
            let product_after = canon.pair.product()?;
            let scale = product_before.max_abs().max(f64::MIN_POSITIVE);
            let d = canon.pair.dim();
            let vvt = canon.pair.v.matmul(&canon.pair.v.transpose())?;
            let utu = canon.pair.u.transpose().matmul(&canon.pair.u)?;
            let mut offdiag: f64 = 0.0;
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        offdiag = offdiag.max(utu.get(i, j).abs());
                    }
                }
            }
            let audit = CanonicalAudit {
                spectrum: canon.spectrum.clone(),
                degenerate: canon.is_degenerate(),
                degenerate_pairs: canon.degenerate_pairs.clone(),
                unsigned_columns: canon.unsigned_columns.clone(),
                product_residual_relative: product_after.max_abs_diff(&product_before) / scale,
                v_orthonormality_residual: vvt.max_abs_diff(&Matrix::identity(d)),
                u_gram_offdiagonal_max: offdiag,
            };

            let out_emb = emb.with_v(canon.pair.v.clone())?;
            save_embedding_text(&out_emb, &out_v, format.into())?;
            manifest.record_output(&out_v);
            save_matrix_text(&canon.pair.u, &out_u)?;
            manifest.record_output(&out_u);
            write_json(&report, &audit)?;
            manifest.record_output(&report);
            manifest.write()
        }

        Command::Whiten { v, out, format } => {
            let mut manifest = ManifestBuilder::new(command_line(), None);
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            let whitened = whiten(emb.v())?;
            let out_emb = emb.with_v(whitened)?;
            save_embedding_text(&out_emb, &out, format.into())?;
            manifest.record_output(&out);
            manifest.write()
        }

        Command::Tie {
            v,
            u,
            mode,
            out,
            format,
        } => {
            let mut manifest = ManifestBuilder::new(command_line(), None);
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            read_input(&mut manifest, &u)?;
            let u_matrix = load_matrix_text(&u)?;
            let pair = FactorPair::new(u_matrix, emb.v().clone())?;
            let tied = match mode {
                TieModeArg::Solve => {
                    let tie = symmetric_tie(&pair)?;
                    println!("residual: {}", fmt17(tie.residual));
                    tie.v_tied
                }
                TieModeArg::Sum => sum_tie(&pair)?,
            };
            let out_emb = emb.with_v(tied)?;
            save_embedding_text(&out_emb, &out, format.into())?;
            manifest.record_output(&out);
            manifest.write()
        }

        Command::Evaluate {
            v,
            testset,
            method,
            oov: _,
        } => {
            let mut manifest = ManifestBuilder::new(command_line(), None);
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            read_input(&mut manifest, &testset)?;
            let ts = load_testset(&testset)?;
            let report = evaluate(&emb, &ts, method.into(), OovPolicy::Skip)?;
            print_report(&report);
            Ok(())
        }

        Command::SweepAlpha {
            v,
            lambda,
            alphas,
            testset,
            method,
            out,
            seed,
        } => {
            let seed_value = resolve_seed(seed);
            let mut manifest = ManifestBuilder::new(command_line(), Some(seed_value));
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            read_input(&mut manifest, &testset)?;
            let ts = load_testset(&testset)?;
            let alphas = parse_alpha_grid(&alphas)?;
            let lambda_transform = resolve_lambda(&lambda, &emb, seed_value, &mut manifest)?;
            let sweep = alpha_sweep(
                &emb,
                &lambda_transform,
                &lambda,
                &alphas,
                &[&ts],
                method.into(),
            )?;
            let mut file = fs::File::create(&out).map_err(|e| CliError::io(&out, e))?;
            sweep.write_csv(&mut file).map_err(|e| CliError::io(&out, e))?;
            manifest.record_output(&out);
            manifest.write()
        }

        Command::StudyRandom {
            v,
            kind,
            runs,
            seed,
            testset,
            method,
            out,
        } => {
            let seed_value = resolve_seed(seed);
            let mut manifest = ManifestBuilder::new(command_line(), Some(seed_value));
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            read_input(&mut manifest, &testset)?;
            let ts = load_testset(&testset)?;
            let dist =
                random_transform_study(&emb, kind.into(), runs, seed_value, &ts, method.into())?;
            let mut file = fs::File::create(&out).map_err(|e| CliError::io(&out, e))?;
            dist.write_csv(&mut file).map_err(|e| CliError::io(&out, e))?;
            manifest.record_output(&out);
            manifest.write()
        }

        Command::OptimizeDiag {
            v,
            testset,
            method,
            kfold,
            seed,
            out,
        } => {
            let seed_value = resolve_seed(seed);
            let mut manifest = ManifestBuilder::new(command_line(), Some(seed_value));
            let emb = load_embedding_tracked(&mut manifest, &v, EmbeddingFormat::Auto)?;
            read_input(&mut manifest, &testset)?;
            let ts = load_testset(&testset)?;
            let opts = OptimizerOptions::default();
            match kfold {
                Some(k) => {
                    let result = cross_validated_optimize(
                        &emb,
                        &ts,
                        method.into(),
                        k,
                        seed_value,
                        &opts,
                    )?;
                    write_json(&out, &result)?;
                }
                None => {
                    let result = optimize_diag(&emb, &ts, method.into(), &opts)?;
                    write_json(&out, &result)?;
                }
            }
            manifest.record_output(&out);
            manifest.write()
        }
    }
}

#[derive(Serialize)]
struct CanonicalAudit {
    spectrum: Vec<f64>,
    degenerate: bool,
    degenerate_pairs: Vec<usize>,
    unsigned_columns: Vec<usize>,
    product_residual_relative: f64,
    v_orthonormality_residual: f64,
    u_gram_offdiagonal_max: f64,
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(value).expect("report serializes");
    fs::write(path, format!("{json}\n")).map_err(|e| CliError::io(path, e))
}

fn print_report(report: &EvalReport) {
    println!("testset: {}", report.testset);
    println!("method: {}", report.method.as_str());
    println!("score: {}", fmt17(report.score));
    println!("pairs_used: {}", report.pairs_used);
    println!("pairs_skipped_oov: {}", report.pairs_skipped_oov);
    println!("pairs_skipped_zero: {}", report.pairs_skipped_zero);
}

/// Parses `start:end:step` into an inclusive, strictly increasing grid.
fn parse_alpha_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let fields: Vec<&str> = spec.split(':').collect();
    if fields.len() != 3 {
        return Err(CliError::Usage(format!(
            "--alphas expects start:end:step, got `{spec}`"
        )));
    }
    let parse = |s: &str| -> Result<f64, CliError> {
        s.parse()
            .map_err(|_| CliError::Usage(format!("`{s}` in --alphas is not a number")))
    };
    let start = parse(fields[0])?;
    let end = parse(fields[1])?;
    let step = parse(fields[2])?;
    if step <= 0.0 || end < start {
        return Err(CliError::Usage(
            "--alphas needs end >= start and step > 0".into(),
        ));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Resolves the `--lambda` flag: a named preset built from the singular
/// values of `V`, or `file:PATH` naming a CSV diagonal matrix.
fn resolve_lambda(
    spec: &str,
    emb: &Embedding,
    seed: u64,
    manifest: &mut ManifestBuilder,
) -> Result<Transform, CliError> {
    if let Some(path) = spec.strip_prefix("file:") {
        let path = PathBuf::from(path);
        read_input(manifest, &path)?;
        let m = load_matrix_csv(&path)?;
        return Ok(Transform::new(m, TransformKind::Diagonal)?);
    }
    let sigma = singular_values(emb.v());
    if sigma.len() != emb.dim() {
        return Err(CliError::Usage(format!(
            "embedding has fewer words than dimensions; {} singular values for dimension {}",
            sigma.len(),
            emb.dim()
        )));
    }
    let presets = lambda_presets(&sigma, seed)?;
    presets
        .into_iter()
        .find(|(name, _)| name == spec)
        .map(|(_, t)| t)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown --lambda `{spec}` (expected sigma, linear, uniform, absnormal, or file:PATH)"
            ))
        })
}
