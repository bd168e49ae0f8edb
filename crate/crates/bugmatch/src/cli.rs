//! Subcommands of the `bugmatch` binary.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use bugmatch_core::classify::{train_la, tune_threshold, FittedClassifier};
use bugmatch_core::corpus::{commits_from_documents, documents_from_commits, parse_unified_diff, preprocess_change};
use bugmatch_core::eval::{build_period_index, evaluate_period, run_evaluation, split_periods};
use bugmatch_core::linerank::{rank_lines, Counting, TokenSource};
use bugmatch_core::pipeline::{buggy_tokens, candidate_hits, commit_lines, predict_commit, to_matches};
use bugmatch_core::{
    BuggyTokenSet, Change, Commit, CorpusDocument, EvalMode, InvertedIndex, Label, Member, PeriodReport,
    ThresholdConfig, ThresholdSetting,
};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ModeSelection, RunConfig, TScore};
use crate::ingest::{attach_labels, extract_commit, ingest_repository, RepoSource};
use crate::report::{self, Manifest};
use crate::synth::{generate, SynthParams};
use crate::{io, snapshot};

#[derive(Debug, Parser)]
#[command(name = "bugmatch", version, about = "Retrieval-based just-in-time defect prediction")]
pub struct Cli {
    /// TOML run configuration; flags override its fields.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// More log output; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract a corpus from a git repository and a label file.
    Ingest(IngestArgs),
    /// Build an index snapshot from a corpus.
    Index(IndexArgs),
    /// Add a corpus to an existing index snapshot.
    Update(UpdateArgs),
    /// Classify one commit; exits 0 when clean, 1 when buggy, 2 on error.
    Predict(PredictArgs),
    /// Tune the score threshold on a corpus.
    Tune(TuneArgs),
    /// Run the chronological evaluation.
    Evaluate(EvaluateArgs),
    /// Rank a commit's added lines by buggy-token hits.
    RankLines(PredictArgs),
    /// Write a synthetic corpus with planted recurring bugs.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub repo: Option<PathBuf>,
    /// Header-less `commit_hash,label` CSV.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub branch: Option<String>,
    /// Only commits authored at or after this Unix time.
    #[arg(long)]
    pub since: Option<i64>,
    /// Only commits authored before this Unix time.
    #[arg(long)]
    pub until: Option<i64>,
    /// Corpus file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Snapshot file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UpdateArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Where to write the extended snapshot; defaults to `--index`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct ModelFlags {
    #[arg(long, value_delimiter = ',', value_parser = parse_member)]
    pub members: Option<Vec<Member>>,
    #[arg(long)]
    pub k: Option<usize>,
    /// `auto` or a number.
    #[arg(long)]
    pub t_score: Option<TScore>,
    /// Use the raw lines-added count instead of its logarithm.
    #[arg(long)]
    pub no_la_log: bool,
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long)]
    pub max_query_terms: Option<usize>,
    #[arg(long)]
    pub min_term_freq: Option<u32>,
    #[arg(long)]
    pub min_doc_freq: Option<u64>,
    #[arg(long)]
    pub top_m: Option<usize>,
    #[arg(long, value_parser = parse_counting)]
    pub counting: Option<Counting>,
    #[arg(long, value_parser = parse_source)]
    pub token_source: Option<TokenSource>,
}

#[derive(Debug, Args)]
#[group(id = "probe", required = true, multiple = false, args = ["diff", "commit"])]
pub struct PredictArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Unified diff of the commit; `-` reads standard input.
    #[arg(long)]
    pub diff: Option<PathBuf>,
    /// Commit to read from `--repo`.
    #[arg(long, requires = "repo")]
    pub commit: Option<String>,
    #[arg(long)]
    pub repo: Option<PathBuf>,
    /// Also write the report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeSelection>,
    #[arg(long)]
    pub window_days: Option<u32>,
    #[arg(long)]
    pub gap_days: Option<u32>,
    /// Typical bug-fix delay; sets the gap to this minus the window.
    #[arg(long)]
    pub bug_fix_delay_days: Option<u32>,
    #[arg(long)]
    pub top_k_lines: Option<usize>,
    /// Directory for the CSV, JSON records and manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelFlags,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 2000)]
    pub commits: usize,
    #[arg(long, default_value_t = 730)]
    pub days: u32,
    #[arg(long, default_value_t = 0.15)]
    pub buggy_fraction: f64,
    #[arg(long, default_value_t = 25)]
    pub families: usize,
}

fn parse_member(s: &str) -> Result<Member, String> {
    match s.to_ascii_lowercase().as_str() {
        "knn" => Ok(Member::Knn),
        "threshold" => Ok(Member::Threshold),
        "la" => Ok(Member::La),
        _ => Err(format!("unknown classifier {s:?} (expected knn, threshold or la)")),
    }
}

fn parse_counting(s: &str) -> Result<Counting, String> {
    match s {
        "distinct" => Ok(Counting::Distinct),
        "repetitions" => Ok(Counting::Repetitions),
        _ => Err(format!("expected distinct or repetitions, got {s:?}")),
    }
}

fn parse_source(s: &str) -> Result<TokenSource, String> {
    match s {
        "topbuggy" | "top-buggy" => Ok(TokenSource::TopBuggy),
        "union" => Ok(TokenSource::Union),
        _ => Err(format!("expected top-buggy or union, got {s:?}")),
    }
}

impl ModelFlags {
    fn apply(&self, cfg: &mut RunConfig) {
        let c = &mut cfg.classifier;
        if let Some(m) = &self.members {
            c.members.clone_from(m);
        }
        if let Some(k) = self.k {
            c.k = k;
        }
        if let Some(t) = self.t_score {
            c.t_score = t;
        }
        if self.no_la_log {
            c.la_log_transform = false;
        }
        let m = &mut cfg.mlt;
        if let Some(v) = self.top_k {
            m.top_k = v;
        }
        if let Some(v) = self.max_query_terms {
            m.max_query_terms = v;
        }
        if let Some(v) = self.min_term_freq {
            m.min_term_freq = v;
        }
        if let Some(v) = self.min_doc_freq {
            m.min_doc_freq = v;
        }
        let l = &mut cfg.linerank;
        if let Some(v) = self.top_m {
            l.top_m = v;
        }
        if let Some(v) = self.counting {
            l.counting = v;
        }
        if let Some(v) = self.token_source {
            l.source = v;
        }
    }
}

/// Parses arguments, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let _ = env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .parse_default_env()
        .format_timestamp(None)
        .try_init();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn base_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    Ok(cfg)
}

pub fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = base_config(&cli)?;
    if cfg.threads > 0 {
        // a pool may already exist when called in-process more than once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build_global();
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Ingest(args) => cmd_ingest(&mut cfg, args, &mut out),
        Command::Index(args) => cmd_index(&mut cfg, args, &mut out),
        Command::Update(args) => cmd_update(args, &mut out),
        Command::Predict(args) => cmd_predict(&mut cfg, args, false, &mut out),
        Command::RankLines(args) => cmd_predict(&mut cfg, args, true, &mut out),
        Command::Tune(args) => cmd_tune(&mut cfg, args, &mut out),
        Command::Evaluate(args) => cmd_evaluate(&mut cfg, args, &mut out),
        Command::Synth(args) => cmd_synth(&cfg, args, &mut out),
    }
}

fn required(flag: Option<PathBuf>, from_config: &Option<PathBuf>, name: &str) -> Result<PathBuf> {
    flag.or_else(|| from_config.clone())
        .ok_or_else(|| anyhow!("missing --{name} (or its config entry)"))
}

fn load_commits(path: &Path) -> Result<(Vec<CorpusDocument>, Vec<Commit>)> {
    let docs = io::load_corpus(path).with_context(|| format!("loading corpus {}", path.display()))?;
    let commits = commits_from_documents(&docs).with_context(|| format!("corpus {}", path.display()))?;
    Ok((docs, commits))
}

fn cmd_ingest(cfg: &mut RunConfig, args: IngestArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let repo = required(args.repo, &cfg.input.repo, "repo")?;
    let dest = required(args.out, &cfg.output.out, "out")?;
    let labels_path = args.labels.or_else(|| cfg.input.labels.clone());
    // read labels first so a bad path fails before any git work
    let labels = match &labels_path {
        Some(p) => io::load_labels(p)?,
        None => {
            log::warn!("no label file given; every commit is ingested as clean");
            BTreeMap::new()
        }
    };
    let source = RepoSource {
        repo_path: repo,
        branch: args.branch.or_else(|| cfg.input.branch.clone()),
        since_ts: args.since,
        until_ts: args.until,
    };
    let commits = attach_labels(ingest_repository(&source)?, &labels);
    let docs = documents_from_commits(&commits);
    io::write_corpus(&docs, &dest)?;
    let buggy = commits.iter().filter(|c| c.label.is_buggy()).count();
    writeln!(
        out,
        "ingested {} commits ({} buggy), {} documents -> {}",
        commits.len(),
        buggy,
        docs.len(),
        dest.display()
    )?;
    Ok(ExitCode::SUCCESS)
}

/// Documents in file order, as index input.
fn document_changes(docs: &[CorpusDocument]) -> Vec<(Change, i64)> {
    docs.iter().map(|d| (preprocess_change(d.to_change()), d.author_ts)).collect()
}

pub fn index_documents(docs: &[CorpusDocument]) -> Result<InvertedIndex> {
    commits_from_documents(docs)?;
    let changes = document_changes(docs);
    Ok(InvertedIndex::from_changes(
        Default::default(),
        changes.iter().map(|(c, ts)| (c, *ts)),
    ))
}

fn cmd_index(cfg: &mut RunConfig, args: IndexArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let corpus = required(args.corpus, &cfg.input.corpus, "corpus")?;
    let dest = required(args.out, &cfg.output.out, "out")?;
    let docs = io::load_corpus(&corpus)?;
    let index = index_documents(&docs).with_context(|| format!("corpus {}", corpus.display()))?;
    snapshot::save(&index, &dest)?;
    writeln!(out, "indexed {} documents -> {}", index.len(), dest.display())?;
    Ok(ExitCode::SUCCESS)
}

/// Appends `docs` to `index`; rejects documents already present.
pub fn extend_index(index: &mut InvertedIndex, docs: &[CorpusDocument]) -> Result<usize> {
    commits_from_documents(docs)?;
    let existing: BTreeSet<(&str, &str)> = index
        .documents()
        .iter()
        .map(|d| (d.commit_hash.as_str(), d.file_path.as_str()))
        .collect();
    if let Some(d) = docs
        .iter()
        .find(|d| existing.contains(&(d.commit_hash.as_str(), d.file_path.as_str())))
    {
        bail!("{} {} is already indexed", d.commit_hash, d.file_path);
    }
    let changes = document_changes(docs);
    for (change, ts) in &changes {
        index.add_document(change, *ts);
    }
    Ok(changes.len())
}

fn cmd_update(args: UpdateArgs, out: &mut dyn Write) -> Result<ExitCode> {
    let mut index = snapshot::load(&args.index)
        .with_context(|| format!("loading index {}", args.index.display()))?;
    let docs = io::load_corpus(&args.corpus)?;
    let added = extend_index(&mut index, &docs)?;
    let dest = args.out.unwrap_or(args.index);
    snapshot::save(&index, &dest)?;
    writeln!(out, "added {added} documents ({} total) -> {}", index.len(), dest.display())?;
    Ok(ExitCode::SUCCESS)
}

/// Fits the classifier from what a snapshot holds: per-commit line counts
/// and labels for the la model. An automatic threshold cannot be tuned from a
/// snapshot and must be given explicitly.
pub fn fit_from_index(index: &InvertedIndex, cfg: &RunConfig) -> Result<FittedClassifier> {
    let config = cfg.classifier_config();
    let threshold = if config.uses(Member::Threshold) {
        match config.t_score {
            ThresholdSetting::Fixed(t_score) => Some(ThresholdConfig { t_score }),
            ThresholdSetting::Auto => bail!(
                "the threshold classifier needs a fixed t_score for prediction; \
                 run `bugmatch tune` on the training corpus and pass --t-score"
            ),
        }
    } else {
        None
    };
    let la_model = config.uses(Member::La).then(|| {
        let mut per_commit: BTreeMap<&str, (u64, Label)> = BTreeMap::new();
        for d in index.documents() {
            per_commit.entry(&d.commit_hash).or_insert((0, d.label)).0 += u64::from(d.line_count);
        }
        let data: Vec<(u64, Label)> = per_commit.into_values().collect();
        train_la(&data, &config.la)
    });
    Ok(FittedClassifier {
        config,
        threshold,
        la_model,
    })
}

fn read_probe(args: &PredictArgs) -> Result<Vec<Change>> {
    if let Some(hash) = &args.commit {
        let repo = args.repo.clone().expect("clap enforces --repo");
        let commit = extract_commit(&RepoSource::new(repo), hash)?;
        return Ok(commit.changes);
    }
    let path = args.diff.as_ref().expect("clap enforces --diff or --commit");
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).context("reading diff from stdin")?;
    } else {
        text = std::fs::read_to_string(path).with_context(|| format!("reading diff {}", path.display()))?;
    }
    let files = parse_unified_diff(&text).context("parsing diff")?;
    Ok(files
        .into_iter()
        .map(|f| preprocess_change(Change::from_hunks("", f.path, &f.hunks, Label::Clean)))
        .collect())
}

#[derive(Debug, Serialize)]
struct Support {
    commit_hash: String,
    file_path: String,
    relevance_score: f64,
    label: Label,
}

#[derive(Debug, Serialize)]
struct PredictionReport {
    verdict: Label,
    confidence: f64,
    supporting: Vec<Support>,
    buggy_tokens: Option<BuggyTokenSet>,
    ranked_lines: Vec<bugmatch_core::RankedLine>,
}

fn cmd_predict(cfg: &mut RunConfig, args: PredictArgs, rank_only: bool, out: &mut dyn Write) -> Result<ExitCode> {
    args.model.apply(cfg);
    cfg.validate()?;
    let index = snapshot::load(&args.index).with_context(|| format!("loading index {}", args.index.display()))?;
    let changes = read_probe(&args)?;

    let report = if rank_only {
        let candidates = candidate_hits(&index, &changes, &cfg.mlt, None);
        let tokens = buggy_tokens(&candidates, &cfg.linerank);
        let empty = BuggyTokenSet {
            tokens: Vec::new(),
            source_doc_id: 0,
        };
        let ranked = rank_lines(&commit_lines(&changes), tokens.as_ref().unwrap_or(&empty), cfg.linerank.counting);
        if tokens.is_none() {
            writeln!(out, "no buggy match; lines kept in commit order")?;
        }
        PredictionReport {
            verdict: Label::Clean,
            confidence: 0.0,
            supporting: Vec::new(),
            buggy_tokens: tokens,
            ranked_lines: ranked,
        }
    } else {
        let fitted = fit_from_index(&index, cfg)?;
        let p = predict_commit(&index, &fitted, &changes, &cfg.mlt, &cfg.linerank);
        let supporting = p
            .prediction
            .supporting_matches
            .iter()
            .map(|m| Support {
                commit_hash: m.commit_hash.clone(),
                file_path: index
                    .document(m.doc_id)
                    .map(|d| d.file_path.clone())
                    .unwrap_or_default(),
                relevance_score: m.relevance_score,
                label: m.label,
            })
            .collect();
        PredictionReport {
            verdict: p.prediction.verdict,
            confidence: p.prediction.confidence,
            supporting,
            buggy_tokens: p.buggy_tokens,
            ranked_lines: p.ranked_lines.unwrap_or_default(),
        }
    };

    if !rank_only {
        writeln!(out, "verdict: {} (confidence {:.3})", report.verdict, report.confidence)?;
        if report.supporting.is_empty() {
            writeln!(out, "supporting changes: none")?;
        } else {
            writeln!(out, "supporting changes:")?;
            for s in &report.supporting {
                writeln!(
                    out,
                    "  {} {} score={:.4} label={}",
                    s.commit_hash, s.file_path, s.relevance_score, s.label
                )?;
            }
        }
    }
    if !report.ranked_lines.is_empty() {
        writeln!(out, "ranked lines:")?;
        for l in &report.ranked_lines {
            writeln!(
                out,
                "  {:>3}  {}:{}  hits={}  {}",
                l.rank, l.file_path, l.position, l.occurrence_count, l.line_text
            )?;
        }
    }
    if let Some(path) = &args.out {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(file, &report)?;
    }
    Ok(if !rank_only && report.verdict.is_buggy() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

#[derive(Debug, Serialize)]
struct TuneReport {
    t_score: f64,
    validation_auc: f64,
    queries: usize,
}

fn cmd_tune(cfg: &mut RunConfig, args: TuneArgs, out: &mut dyn Write) -> Result<ExitCode> {
    args.model.apply(cfg);
    cfg.validate()?;
    let corpus = required(args.corpus, &cfg.input.corpus, "corpus")?;
    let (docs, commits) = load_commits(&corpus)?;
    let index = index_documents(&docs)?;
    let mlt = cfg.mlt;
    let validation: Vec<_> = commits
        .par_iter()
        .map(|c| {
            let hits = candidate_hits(&index, &c.changes, &mlt, Some(&c.hash));
            (to_matches(&hits), c.label)
        })
        .collect();
    let tuned = tune_threshold(&validation)?;
    let report = TuneReport {
        t_score: tuned.config.t_score,
        validation_auc: tuned.auc,
        queries: validation.len(),
    };
    writeln!(
        out,
        "t_score = {} (validation AUC {:.4} over {} commits)",
        report.t_score, report.validation_auc, report.queries
    )?;
    if let Some(path) = args.out.or_else(|| cfg.output.out.clone()) {
        let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        serde_json::to_writer_pretty(file, &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Runs the evaluation in every requested mode. Constant-mode periods are
/// independent and run in parallel.
pub fn evaluate_modes(commits: &[Commit], cfg: &RunConfig) -> Result<Vec<PeriodReport>> {
    let eval = cfg.eval_config();
    let mut reports = Vec::new();
    for &mode in cfg.eval.mode.modes() {
        match mode {
            EvalMode::Increasing => reports.extend(run_evaluation(commits, mode, &eval)?),
            EvalMode::Constant => {
                let mut sorted: Vec<&Commit> = commits.iter().collect();
                sorted.sort_by_key(|c| c.author_ts);
                let ts: Vec<i64> = sorted.iter().map(|c| c.author_ts).collect();
                let splits = split_periods(&ts, eval.window_days, eval.gap_days, mode)?;
                let done: Result<Vec<_>, _> = splits
                    .par_iter()
                    .map(|split| {
                        let index = build_period_index(&sorted, split);
                        evaluate_period(&sorted, split, &index, &eval)
                    })
                    .collect();
                reports.extend(done?);
            }
        }
    }
    Ok(reports)
}

fn cmd_evaluate(cfg: &mut RunConfig, args: EvaluateArgs, out: &mut dyn Write) -> Result<ExitCode> {
    args.model.apply(cfg);
    if let Some(m) = args.mode {
        cfg.eval.mode = m;
    }
    if let Some(w) = args.window_days {
        cfg.eval.window_days = w;
    }
    if let Some(g) = args.gap_days {
        cfg.eval.gap_days = Some(g);
    }
    if let Some(d) = args.bug_fix_delay_days {
        cfg.eval.bug_fix_delay_days = Some(d);
        if args.gap_days.is_none() {
            cfg.eval.gap_days = None;
        }
    }
    if let Some(k) = args.top_k_lines {
        cfg.eval.top_k_lines = k;
    }
    cfg.validate()?;
    let corpus = required(args.corpus, &cfg.input.corpus, "corpus")?;
    cfg.input.corpus = Some(corpus.clone());
    let (_, commits) = load_commits(&corpus)?;
    let reports = evaluate_modes(&commits, cfg)?;
    if reports.is_empty() {
        log::warn!("no period had both training and test commits");
    }
    report::print_table(&reports, &mut *out)?;
    if let Some(dir) = args.out.or_else(|| cfg.output.out.clone()) {
        cfg.output.out = Some(dir.clone());
        report::write_evaluation(&dir, &reports)?;
        report::write_manifest(
            &dir,
            &Manifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: "evaluate",
                corpus_sha256: Some(report::file_digest(&corpus)?),
                seed: cfg.seed,
                config: cfg,
            },
        )?;
        writeln!(out, "reports written to {}", dir.display())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_synth(cfg: &RunConfig, args: SynthArgs, out: &mut dyn Write) -> Result<ExitCode> {
    if !(0.0..=1.0).contains(&args.buggy_fraction) {
        bail!("--buggy-fraction must lie in [0, 1]");
    }
    let params = SynthParams {
        commits: args.commits,
        days: args.days,
        buggy_fraction: args.buggy_fraction,
        families: args.families,
        seed: cfg.seed,
        ..SynthParams::default()
    };
    let corpus = generate(&params);
    io::write_corpus(&documents_from_commits(&corpus.commits), &args.out)?;
    writeln!(
        out,
        "wrote {} commits (seed {}) -> {}",
        corpus.commits.len(),
        cfg.seed,
        args.out.display()
    )?;
    Ok(ExitCode::SUCCESS)
}
