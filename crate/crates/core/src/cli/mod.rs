//! Batch command-line frontend.
//!
//! Exit codes: 0 success, 1 parse error, 2 validation error, 3 too many
//! per-document failures during extraction.

use std::collections::HashSet;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use crate::embed_topo::{EmbedTopoConfig, SmoothingMode};
use crate::eval::{
    evaluate, evaluate_probabilities, predict_stacked, split_rows, stack_probabilities, train_linear, EvalError,
    FeatureMatrix, FeatureSet, Labels, LogisticConfig, Probabilities,
};
use crate::format::{read_distance_matrix, write_diagram, MatrixReadError};
use crate::ingest::{load_corpus, load_embeddings, CorpusOptions, IngestError, LabeledCorpus};
use crate::ph::{rips_persistence_with, RipsOptions};
use crate::pipeline::{extract_corpus, ExtractConfig, ExtractError, ExtractMode};
use crate::tfidf_topo::TfidfTopoConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_PARTIAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "texttopo", version, about = "Topological features of text via persistent homology")]
pub struct Cli {
    /// Worker threads for per-document extraction (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Persistence diagram of a distance matrix.
    Ph(PhArgs),
    /// Topological feature matrix of a corpus.
    Extract(ExtractArgs),
    /// Train on the train split, evaluate on the test split.
    TrainEval(TrainEvalArgs),
    /// Write the train/test assignment of a corpus.
    Split(SplitArgs),
}

#[derive(Debug, Args)]
pub struct PhArgs {
    /// Distance matrix: point count on the first line, then one row per line.
    pub matrix: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Truncate the filtration at this scale.
    #[arg(long)]
    pub max_scale: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct CorpusArgs {
    /// CSV with id, text and labels columns.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub min_tokens: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = '|')]
    pub label_delimiter: char,
}

impl CorpusArgs {
    fn options(&self) -> CorpusOptions {
        CorpusOptions {
            min_tokens: self.min_tokens,
            seed: self.seed,
            label_delimiter: self.label_delimiter,
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Word vectors in word2vec text format; required for tp1 and both.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value = "both")]
    pub mode: ExtractMode,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub blocks: usize,
    #[arg(long, default_value_t = 1.0)]
    pub wasserstein_p: f64,
    #[arg(long, default_value = "truncate")]
    pub smoothing: SmoothingMode,
    /// Newline-separated terms excluded from TF-IDF vectors.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Exit with code 3 when more than this fraction of documents fail.
    #[arg(long, default_value_t = 0.1)]
    pub max_skip_fraction: f64,
}

#[derive(Debug, Args)]
pub struct TrainEvalArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Feature CSV from `extract` (not used by the ensemble feature set).
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// tp1, tp2, tp1+tp2, all, or ensemble.
    #[arg(long, default_value = "tp1+tp2")]
    pub feature_set: String,
    /// Class-probability CSVs to stack for the ensemble feature set.
    #[arg(long)]
    pub proba_a: Option<PathBuf>,
    #[arg(long)]
    pub proba_b: Option<PathBuf>,
    /// Evaluation report CSV; the same report is printed as a table.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Class probabilities for every row (train and test).
    #[arg(long)]
    pub proba_out: Option<PathBuf>,
    /// L2 penalty; defaults to 1 for feature models and 0.001 for the ensemble.
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// A failed command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn parse(message: impl ToString) -> Self {
        CliError { code: EXIT_PARSE, message: message.to_string() }
    }

    fn validation(message: impl ToString) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.to_string() }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        if e.is_parse_error() {
            CliError::parse(e)
        } else {
            CliError::validation(e)
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Parse { .. } | EvalError::Csv(_) => CliError::parse(e),
            _ => CliError::validation(e),
        }
    }
}

impl From<ExtractError> for CliError {
    fn from(e: ExtractError) -> Self {
        match e {
            ExtractError::Ingest(e) => e.into(),
            ExtractError::Eval(e) => e.into(),
            other => CliError::validation(other),
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            warn!("could not configure thread pool: {e}");
        }
    }
    let result = match cli.command {
        Command::Ph(args) => cmd_ph(&args),
        Command::Extract(args) => cmd_extract(&args),
        Command::TrainEval(args) => cmd_train_eval(&args),
        Command::Split(args) => cmd_split(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::validation(format!("{what} '{}' does not exist or is not a file", path.display())))
    }
}

fn require_output(path: &Path) -> Result<(), CliError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    if parent.is_dir() {
        Ok(())
    } else {
        Err(CliError::validation(format!("output directory '{}' does not exist", parent.display())))
    }
}

/// Writes via a sibling temporary file and a rename, so a failed write leaves nothing behind.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    let written = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(contents).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    written.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::validation(format!("cannot write '{}': {e}", path.display()))
    })
}

pub fn cmd_ph(args: &PhArgs) -> Result<i32, CliError> {
    require_file(&args.matrix, "distance matrix")?;
    require_output(&args.out)?;
    let file =
        fs::File::open(&args.matrix).map_err(|e| CliError::validation(format!("{}: {e}", args.matrix.display())))?;
    let dist = read_distance_matrix(BufReader::new(file)).map_err(|e| match e {
        MatrixReadError::Parse(p) => CliError::parse(p),
        MatrixReadError::Invalid(v) => CliError::validation(v),
    })?;
    let pd = rips_persistence_with(&dist, &RipsOptions { max_scale: args.max_scale }).map_err(CliError::validation)?;
    write_atomic(&args.out, write_diagram(&pd).as_bytes())?;
    Ok(EXIT_OK)
}

fn read_stoplist(path: &Path) -> Result<HashSet<String>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect())
}

pub fn cmd_extract(args: &ExtractArgs) -> Result<i32, CliError> {
    require_file(&args.corpus.corpus, "corpus")?;
    match (&args.embeddings, args.mode.needs_embeddings()) {
        (Some(p), _) => require_file(p, "embeddings")?,
        (None, true) => return Err(CliError::validation("--embeddings is required for modes tp1 and both")),
        (None, false) => {}
    }
    if let Some(p) = &args.stoplist {
        require_file(p, "stoplist")?;
    }
    require_output(&args.out)?;
    if args.blocks < 2 {
        return Err(CliError::validation("--blocks must be at least 2"));
    }
    if !(1.0..f64::INFINITY).contains(&args.wasserstein_p) {
        return Err(CliError::validation("--wasserstein-p must be a finite number >= 1"));
    }
    if !(0.0..=1.0).contains(&args.max_skip_fraction) {
        return Err(CliError::validation("--max-skip-fraction must lie in [0, 1]"));
    }

    let corpus = load_corpus(&args.corpus.corpus, &args.corpus.options())?;
    let table = match (&args.embeddings, args.mode.needs_embeddings()) {
        (Some(p), true) => Some(load_embeddings(p)?),
        _ => None,
    };
    if let Some(t) = &table {
        if t.dim() < 3 {
            return Err(CliError::validation(format!("embedding dimension {} is below the minimum of 3", t.dim())));
        }
    }
    let config = ExtractConfig {
        embed: EmbedTopoConfig { smoothing: args.smoothing, p: args.wasserstein_p },
        tfidf: TfidfTopoConfig {
            blocks: args.blocks,
            stoplist: args.stoplist.as_deref().map(read_stoplist).transpose()?,
        },
    };
    info!("extracting {:?} features for {} documents", args.mode, corpus.len());
    let extraction = extract_corpus(&corpus, args.mode, table.as_ref(), &config)?;
    for (id, err) in &extraction.failures {
        warn!("skipped document '{id}': {err}");
    }

    let mut buf = Vec::new();
    extraction.features.write_csv(&mut buf)?;
    write_atomic(&args.out, &buf)?;

    let skipped = extraction.failures.len();
    if skipped > 0 {
        eprintln!("skipped {skipped} of {} documents", corpus.len());
    }
    if corpus.is_empty() || (skipped as f64) > args.max_skip_fraction * corpus.len() as f64 {
        if corpus.is_empty() {
            eprintln!("error: no documents survived loading");
        }
        return Ok(EXIT_PARTIAL);
    }
    Ok(EXIT_OK)
}

fn read_features(path: &Path) -> Result<FeatureMatrix, CliError> {
    let file = fs::File::open(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    Ok(FeatureMatrix::read_csv(BufReader::new(file))?)
}

fn read_probabilities(path: &Path) -> Result<Probabilities, CliError> {
    Ok(Probabilities::from_features(&read_features(path)?)?)
}

fn write_probabilities(path: &Path, proba: &Probabilities) -> Result<(), CliError> {
    let mut buf = Vec::new();
    proba.to_features("")?.write_csv(&mut buf)?;
    write_atomic(path, &buf)
}

fn emit_report(args: &TrainEvalArgs, report: &crate::eval::EvalReport) -> Result<(), CliError> {
    write_atomic(&args.out, report.to_csv().as_bytes())?;
    print!("{}", report.to_table());
    Ok(())
}

pub fn cmd_train_eval(args: &TrainEvalArgs) -> Result<i32, CliError> {
    require_file(&args.corpus.corpus, "corpus")?;
    require_output(&args.out)?;
    for p in [&args.model_out, &args.proba_out].into_iter().flatten() {
        require_output(p)?;
    }
    let ensemble = args.feature_set == "ensemble";
    let feature_set = if ensemble { None } else { Some(args.feature_set.parse::<FeatureSet>()?) };
    if ensemble {
        let a = args.proba_a.as_ref().ok_or_else(|| CliError::validation("ensemble needs --proba-a"))?;
        require_file(a, "probabilities")?;
        if let Some(b) = &args.proba_b {
            require_file(b, "probabilities")?;
        }
    } else {
        let f = args.features.as_ref().ok_or_else(|| CliError::validation("--features is required"))?;
        require_file(f, "features")?;
    }
    let config = LogisticConfig {
        l2: args.l2.unwrap_or(if ensemble { LogisticConfig::stacking().l2 } else { LogisticConfig::default().l2 }),
        max_iter: args.max_iter,
        ..Default::default()
    };

    let corpus = load_corpus(&args.corpus.corpus, &args.corpus.options())?;
    if ensemble {
        return train_eval_ensemble(args, &corpus, &config);
    }

    let features = read_features(args.features.as_ref().expect("checked above"))?;
    let features = features.select_columns(|n| feature_set.expect("checked above").includes(n));
    if features.n_cols() == 0 {
        return Err(CliError::validation(format!("feature set '{}' selects no columns", args.feature_set)));
    }
    let (train_ids, test_ids) = split_rows(&features, &corpus)?;
    let train = features.select_rows(&train_ids)?;
    let test = features.select_rows(&test_ids)?;
    let model = train_linear(&train, &Labels::from_corpus(&corpus, &train_ids)?, &config)?;
    let report = evaluate(&model, &test, &Labels::from_corpus(&corpus, &test_ids)?)?;

    if let Some(p) = &args.model_out {
        write_atomic(p, model.to_text().as_bytes())?;
    }
    if let Some(p) = &args.proba_out {
        write_probabilities(p, &model.predict_proba(&features)?)?;
    }
    emit_report(args, &report)?;
    Ok(EXIT_OK)
}

fn train_eval_ensemble(args: &TrainEvalArgs, corpus: &LabeledCorpus, config: &LogisticConfig) -> Result<i32, CliError> {
    let mut sources = vec![read_probabilities(args.proba_a.as_ref().expect("checked by caller"))?];
    if let Some(b) = &args.proba_b {
        sources.push(read_probabilities(b)?);
    }
    let ids = sources[0].ids.clone();
    let pick = |p: &Probabilities, rows: &[String]| -> Result<Probabilities, CliError> {
        let m = p.to_features("")?.select_rows(rows)?;
        Ok(Probabilities::from_features(&m)?)
    };
    let keyed = FeatureMatrix::new(ids.clone(), vec![], vec![])?;
    let (train_ids, test_ids) = split_rows(&keyed, corpus)?;
    let train: Vec<Probabilities> = sources.iter().map(|s| pick(s, &train_ids)).collect::<Result<_, _>>()?;
    let test: Vec<Probabilities> = sources.iter().map(|s| pick(s, &test_ids)).collect::<Result<_, _>>()?;

    let train_refs: Vec<&Probabilities> = train.iter().collect();
    let test_refs: Vec<&Probabilities> = test.iter().collect();
    let model = stack_probabilities(&train_refs, &Labels::from_corpus(corpus, &train_ids)?, config)?;
    let report =
        evaluate_probabilities(&predict_stacked(&model, &test_refs)?, &Labels::from_corpus(corpus, &test_ids)?)?;

    if let Some(p) = &args.model_out {
        write_atomic(p, model.to_text().as_bytes())?;
    }
    if let Some(p) = &args.proba_out {
        let all: Vec<&Probabilities> = sources.iter().collect();
        write_probabilities(p, &predict_stacked(&model, &all)?)?;
    }
    emit_report(args, &report)?;
    Ok(EXIT_OK)
}

pub fn cmd_split(args: &SplitArgs) -> Result<i32, CliError> {
    require_file(&args.corpus.corpus, "corpus")?;
    require_output(&args.out)?;
    let corpus = load_corpus(&args.corpus.corpus, &args.corpus.options())?;
    let mut out = String::from("id,split\n");
    let mut w = csv::Writer::from_writer(Vec::new());
    for doc in &corpus.documents {
        w.write_record([doc.id.as_str(), doc.split.name()]).map_err(CliError::validation)?;
    }
    let body = w.into_inner().map_err(|e| CliError::validation(e.to_string()))?;
    out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
    write_atomic(&args.out, out.as_bytes())?;
    Ok(EXIT_OK)
}
