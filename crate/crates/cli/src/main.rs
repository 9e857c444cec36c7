mod config;

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use tarc_core::code_system::{contains_path, expand, CodeSystemError};
use tarc_core::collection::{
    default_categories, ingest_raw, match_categories, parse_categories, CityTable, CollectionError, DirectoryFetcher,
    TextFetcher,
};
use tarc_core::corpus::{flatten_sentences, parse_tsv, reconstruct_sentences, write_tsv, CorpusError, TokenRecord};
use tarc_core::evaluation::{run_cv, EvaluationError, FoldPlan};
use tarc_core::normalization::{filter_code_switch_sentences, normalize, LexiconError};
use tarc_core::segmentation::{fuse_morphemes, segment, SegmentationError};
use tarc_core::transliteration::{pairs_from_corpus, TrainingPair, TransliterationError};
use tarc_core::Transducer;
use tarc_service::api::DEFAULT_BLOCK_SIZE;
use tarc_service::{Store, StoreError};

use config::{CliConfig, FileConfig, Overrides};

/// Tunisian Arabish to Arabic-script transcription: normalization,
/// segmentation, candidate lattices, training, cross-validation and the
/// block annotation loop.
///
/// Data goes to stdout, logs to stderr (`-v` for more).
#[derive(Debug, Parser)]
#[command(name = "tarc", version)]
struct Cli {
    /// TOML file with defaults for any of the global flags.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Seed for every random choice [default: 42].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Mapping table replacing the bundled one.
    #[arg(long, global = true, value_name = "FILE")]
    mapping_table: Option<PathBuf>,
    /// Clitic inventory replacing the bundled one.
    #[arg(long, global = true, value_name = "FILE")]
    clitics: Option<PathBuf>,
    /// Exception lexicon replacing the bundled seed lexicon.
    #[arg(long, global = true, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Morpheme n-gram order [default: 2].
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Add-k smoothing constant [default: 0.1].
    #[arg(long, global = true)]
    add_k: Option<f64>,
    /// Ranked candidates kept per token [default: 16].
    #[arg(long, global = true)]
    beam: Option<usize>,
    /// Channel weight against the language model, in [0, 1] [default: 0.5].
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// More log output; repeat for debug.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Turn raw text dumps (`*.txt` with a `key: value` header) into corpus rows.
    Ingest(IngestArgs),
    /// Collapse prosodic repetition and flag loanwords, code-switching and negation.
    Normalize(TokensArgs),
    /// List the clitic segmentations of tokens.
    Segment(TokensArgs),
    /// Expand a token into its Arabic-script candidate lattice.
    Expand(ExpandArgs),
    /// Train a model on an annotated corpus.
    Train(TrainArgs),
    /// Transcribe tokens with a trained model.
    Predict(PredictArgs),
    /// k-fold cross-validation on an annotated corpus.
    Cv(CvArgs),
    /// Block annotation loop over a store directory.
    #[command(subcommand)]
    Block(BlockCommand),
    /// Serve a store over HTTP.
    Serve(ServeArgs),
    /// Write a store's current corpus as TSV.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct CorpusArg {
    /// Annotated corpus in the 12-column TSV format.
    #[arg(long, value_name = "FILE")]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StoreArg {
    /// Store directory.
    #[arg(long, value_name = "DIR")]
    store: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Directory of raw dumps.
    #[arg(long, value_name = "DIR")]
    raw: PathBuf,
    /// Keyword categories (`name<TAB>meanings<TAB>keywords`), replacing the bundled ones.
    #[arg(long, value_name = "FILE")]
    categories: Option<PathBuf>,
    /// City to variety-code table, replacing the bundled one.
    #[arg(long, value_name = "FILE")]
    cities: Option<PathBuf>,
    /// Skip texts that match no category keyword.
    #[arg(long)]
    matching_only: bool,
    /// Output file; stdout if absent.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TokensArgs {
    /// Tokens; read one per line from stdin if none are given.
    tokens: Vec<String>,
}

#[derive(Debug, Args)]
struct ExpandArgs {
    token: String,
    /// Treat the token as an acclimatized loanword.
    #[arg(long)]
    loanword: bool,
    /// Print at most this many paths.
    #[arg(long, default_value_t = 20)]
    limit: usize,
    /// Only print the number of paths.
    #[arg(long)]
    count: bool,
    /// Print whether this Arabic string is a path of the lattice.
    #[arg(long, value_name = "ARABIC")]
    contains: Option<String>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    /// Where to write the model.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// Trained model file.
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Train on this corpus instead of loading a model.
    #[command(flatten)]
    corpus: CorpusArg,
    /// Token to transcribe; repeatable. Also accepted positionally.
    #[arg(long = "token", value_name = "TOKEN")]
    token_flags: Vec<String>,
    tokens: Vec<String>,
    /// Treat every token as an acclimatized loanword.
    #[arg(long)]
    loanword: bool,
    /// Print full predictions (morphemes, score, alternatives) as JSON lines.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CvArgs {
    #[command(flatten)]
    corpus: CorpusArg,
    /// Number of folds.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Keep every sentence inside one fold.
    #[arg(long)]
    grouped: bool,
    /// JSON report instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Subcommand)]
enum BlockCommand {
    /// Create a store from a corpus; model version 1 is trained on `--train`.
    Init {
        #[command(flatten)]
        store: StoreArg,
        #[command(flatten)]
        corpus: CorpusArg,
        /// Annotated corpus for the first model.
        #[arg(long, value_name = "FILE")]
        train: PathBuf,
    },
    /// Cut the next block from the corpus stream.
    Make {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
        size: usize,
    },
    /// Annotate a raw block with the current model.
    Auto {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long)]
        id: u32,
    },
    /// Write a block for review.
    Export {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long)]
        id: u32,
        #[arg(long, value_enum, default_value_t = ExportFormat::Corrections)]
        format: ExportFormat,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Apply a corrections sheet (as written by `block export`).
    ImportCorrections {
        #[command(flatten)]
        store: StoreArg,
        #[arg(long)]
        id: u32,
        #[arg(long, value_name = "FILE")]
        file: PathBuf,
    },
    /// Train the next model version on the seed data plus all corrected blocks.
    Retrain {
        #[command(flatten)]
        store: StoreArg,
        /// Also cross-validate the new training set with this many folds.
        #[arg(long)]
        cv: Option<usize>,
    },
    /// List blocks with status and accuracy.
    List {
        #[command(flatten)]
        store: StoreArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// `key, arabish, predicted, final` per surface token; edit the last column.
    Corrections,
    /// The block's corpus rows.
    Tsv,
    /// Full block payload.
    Json,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[command(flatten)]
    store: StoreArg,
    #[arg(long, default_value = tarc_service::DEFAULT_BIND)]
    bind: SocketAddr,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    store: StoreArg,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

/// Exit status by error category. Stable across releases.
mod exit {
    pub const FAILURE: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INVALID_INPUT: u8 = 3;
    pub const MODEL: u8 = 4;
    pub const WORKFLOW: u8 = 5;
    pub const IO: u8 = 6;
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    UsageError(message.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return exit::USAGE;
        }
        if let Some(e) = cause.downcast_ref::<StoreError>() {
            return match e {
                StoreError::Corpus(_) => exit::INVALID_INPUT,
                StoreError::Transliteration(_) => exit::MODEL,
                StoreError::Io { .. } | StoreError::Json { .. } => exit::IO,
                _ => exit::WORKFLOW,
            };
        }
        if cause.is::<CorpusError>()
            || cause.is::<CodeSystemError>()
            || cause.is::<SegmentationError>()
            || cause.is::<LexiconError>()
            || cause.is::<CollectionError>()
            || cause.is::<toml::de::Error>()
        {
            return exit::INVALID_INPUT;
        }
        if let Some(e) = cause.downcast_ref::<TransliterationError>() {
            return match e {
                TransliterationError::Io(_) => exit::IO,
                TransliterationError::Config(_) => exit::USAGE,
                TransliterationError::Corpus(_) => exit::INVALID_INPUT,
                _ => exit::MODEL,
            };
        }
        if cause.is::<EvaluationError>() {
            return exit::WORKFLOW;
        }
        if cause.is::<io::Error>() {
            return exit::IO;
        }
    }
    exit::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut flags = Overrides {
        seed: cli.seed,
        mapping_table: cli.mapping_table.clone(),
        clitics: cli.clitics.clone(),
        lexicon: cli.lexicon.clone(),
        order: cli.order,
        add_k: cli.add_k,
        beam_width: cli.beam,
        lattice_weight: cli.lambda,
        ..Default::default()
    };
    match &cli.command {
        Command::Train(a) => {
            flags.corpus = a.corpus.corpus.clone();
            flags.model = a.model.clone();
        }
        Command::Predict(a) => {
            flags.corpus = a.corpus.corpus.clone();
            flags.model = a.model.clone();
        }
        Command::Cv(a) => flags.corpus = a.corpus.corpus.clone(),
        Command::Serve(a) => flags.store = a.store.store.clone(),
        Command::Export(a) => flags.store = a.store.store.clone(),
        Command::Block(b) => {
            let (store, corpus) = match b {
                BlockCommand::Init { store, corpus, .. } => (store, corpus.corpus.clone()),
                BlockCommand::Make { store, .. }
                | BlockCommand::Auto { store, .. }
                | BlockCommand::Export { store, .. }
                | BlockCommand::ImportCorrections { store, .. }
                | BlockCommand::Retrain { store, .. }
                | BlockCommand::List { store } => (store, None),
            };
            flags.store = store.store.clone();
            flags.corpus = corpus;
        }
        _ => {}
    }
    let config = CliConfig::resolve(file, flags).map_err(|e| usage(format!("{e:#}")))?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    match cli.command {
        Command::Ingest(a) => ingest(&a, &mut out),
        Command::Normalize(a) => normalize_tokens(&config, &a, &mut out),
        Command::Segment(a) => segment_tokens(&config, &a, &mut out),
        Command::Expand(a) => expand_token(&config, &a, &mut out),
        Command::Train(_) => train(&config, &mut out),
        Command::Predict(a) => predict(&config, &a, &mut out),
        Command::Cv(a) => cv(&config, &a, &mut out),
        Command::Block(b) => block(&config, b, &mut out),
        Command::Serve(a) => serve(&config, a.bind),
        Command::Export(a) => {
            let store = Store::open(require(&config.store, "--store")?)?;
            emit(&a.out, &store.export_tsv()?, &mut out)
        }
    }?;
    out.flush()?;
    Ok(())
}

fn require<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref().ok_or_else(|| usage(format!("missing {flag} (flag or config file)")))
}

fn read_corpus(path: &Path) -> Result<Vec<TokenRecord>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    parse_tsv(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn emit(path: &Option<PathBuf>, bytes: &[u8], out: &mut impl Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => Ok(out.write_all(bytes)?),
    }
}

fn input_tokens(given: &[String]) -> Result<Vec<String>> {
    if !given.is_empty() {
        return Ok(given.to_vec());
    }
    let mut tokens = Vec::new();
    for line in io::stdin().lock().lines() {
        let line = line?;
        let token = line.trim();
        if !token.is_empty() {
            tokens.push(token.to_string());
        }
    }
    Ok(tokens)
}

fn ingest(a: &IngestArgs, out: &mut impl Write) -> Result<()> {
    let categories = match &a.categories {
        Some(p) => parse_categories(&std::fs::read_to_string(p)?)?,
        None => default_categories(),
    };
    let cities = match &a.cities {
        Some(p) => CityTable::parse(&std::fs::read_to_string(p)?)?,
        None => CityTable::default(),
    };
    let texts = DirectoryFetcher::new(&a.raw).fetch()?;
    let mut records = Vec::new();
    for text in &texts {
        let matches = match_categories(text, &categories);
        let names: Vec<&str> = matches.iter().map(|m| m.category.as_str()).collect();
        log::info!("{}/{}: categories {:?}", text.source_code, text.date, names);
        if a.matching_only && matches.is_empty() {
            continue;
        }
        records.extend(ingest_raw(text, &cities));
    }
    log::info!("{} texts, {} rows", texts.len(), records.len());
    emit(&a.out, &write_tsv(&records)?, out)
}

fn normalize_tokens(config: &CliConfig, a: &TokensArgs, out: &mut impl Write) -> Result<()> {
    let lexicon = config.resources()?.lexicon;
    for token in input_tokens(&a.tokens)? {
        let report = normalize(&token, &lexicon);
        let flags: Vec<String> = report
            .flags
            .iter()
            .map(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default())
            .collect();
        let flags = if flags.is_empty() { "-".to_string() } else { flags.join(",") };
        writeln!(out, "{token}\t{}\t{flags}", report.normalized)?;
    }
    Ok(())
}

fn segment_tokens(config: &CliConfig, a: &TokensArgs, out: &mut impl Write) -> Result<()> {
    let clitics = config.resources()?.clitics;
    for token in input_tokens(&a.tokens)? {
        for s in segment(&token, &clitics) {
            writeln!(out, "{token}\t{s}")?;
        }
    }
    Ok(())
}

fn expand_token(config: &CliConfig, a: &ExpandArgs, out: &mut impl Write) -> Result<()> {
    let table = config.resources()?.table;
    let lattice = expand(&table, &a.token, a.loanword)?;
    if let Some(arabic) = &a.contains {
        writeln!(out, "{}", contains_path(&lattice, arabic))?;
        return Ok(());
    }
    writeln!(out, "{}", lattice.path_count())?;
    if a.count {
        return Ok(());
    }
    let mut printed = 0;
    'branches: for branch in &lattice.branches {
        // odometer over the positions of this branch
        let positions: Vec<Vec<&String>> = branch.positions.iter().map(|p| p.iter().collect()).collect();
        let mut digits = vec![0usize; positions.len()];
        if positions.iter().any(|p| p.is_empty()) {
            continue;
        }
        loop {
            if printed == a.limit {
                break 'branches;
            }
            let path: String = positions.iter().zip(&digits).map(|(p, &d)| p[d].as_str()).collect();
            writeln!(out, "{path}")?;
            printed += 1;
            let mut i = digits.len();
            loop {
                if i == 0 {
                    continue 'branches;
                }
                i -= 1;
                digits[i] += 1;
                if digits[i] < positions[i].len() {
                    break;
                }
                digits[i] = 0;
            }
        }
    }
    Ok(())
}

fn corpus_pairs(config: &CliConfig) -> Result<Vec<TrainingPair>> {
    let path = require(&config.corpus, "--corpus")?;
    let records = read_corpus(path)?;
    let (pairs, removed) = pairs_from_corpus(&records, &config.resources()?.lexicon)?;
    log::info!("{} training pairs, {removed} code-switched sentences removed", pairs.len());
    Ok(pairs)
}

fn train_model(config: &CliConfig) -> Result<Transducer> {
    let pairs = corpus_pairs(config)?;
    Ok(Transducer::train(&pairs, config.transducer, config.resources()?)?)
}

fn train(config: &CliConfig, out: &mut impl Write) -> Result<()> {
    let model = train_model(config)?;
    let path = require(&config.model, "--model")?;
    model.save(path)?;
    writeln!(out, "{}", serde_json::to_string_pretty(model.stats())?)?;
    Ok(())
}

fn predict(config: &CliConfig, a: &PredictArgs, out: &mut impl Write) -> Result<()> {
    // a corpus on the command line wins over a model from the config file
    let model = match (&a.corpus.corpus, &config.model, &config.corpus) {
        (Some(_), _, _) | (None, None, Some(_)) => train_model(config)?,
        (None, Some(path), _) => {
            Transducer::load(path).with_context(|| format!("loading model {}", path.display()))?
        }
        (None, None, None) => return Err(usage("need --model or --corpus")),
    };
    let given: Vec<String> = a.token_flags.iter().chain(&a.tokens).cloned().collect();
    for token in input_tokens(&given)? {
        let prediction = model.predict(&token, a.loanword)?;
        if a.json {
            writeln!(out, "{}", serde_json::to_string(&prediction)?)?;
        } else {
            writeln!(out, "{}", fuse_morphemes(&prediction.morphemes))?;
        }
    }
    Ok(())
}

fn cv(config: &CliConfig, a: &CvArgs, out: &mut impl Write) -> Result<()> {
    let resources = config.resources()?;
    let report = if a.grouped {
        let path = require(&config.corpus, "--corpus")?;
        let sentences = reconstruct_sentences(&read_corpus(path)?)?;
        let (kept, _) = filter_code_switch_sentences(sentences, &resources.lexicon);
        let mut pairs = Vec::new();
        let mut groups = Vec::new();
        for (g, sentence) in kept.iter().enumerate() {
            let (sentence_pairs, _) = pairs_from_corpus(&flatten_sentences(std::slice::from_ref(sentence)), &resources.lexicon)?;
            groups.extend(std::iter::repeat_n(g as u64, sentence_pairs.len()));
            pairs.extend(sentence_pairs);
        }
        let plan = FoldPlan::grouped(&groups, a.k, config.seed)?;
        run_cv(&pairs, &plan, true, config.transducer, &resources, |_| true)?
    } else {
        let pairs = corpus_pairs(config)?;
        let plan = FoldPlan::new(pairs.len(), a.k, config.seed)?;
        run_cv(&pairs, &plan, false, config.transducer, &resources, |_| true)?
    };
    if a.json {
        writeln!(out, "{}", report.to_json())?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    Ok(())
}

/// Corrections sheet: header, then `key, arabish, predicted, final` with
/// morphemes separated by single spaces.
fn corrections_sheet(store: &Store, id: u32) -> Result<String> {
    let payload = store.payload(id)?;
    let mut sheet = String::from("key\tarabish\tpredicted\tfinal\n");
    for row in payload.rows.iter().filter(|r| r.surface) {
        let final_ = if row.finals.is_empty() { &row.predicted } else { &row.finals };
        sheet.push_str(&format!("{}\t{}\t{}\t{}\n", row.key, row.arabish, row.predicted.join(" "), final_.join(" ")));
    }
    Ok(sheet)
}

fn read_corrections(path: &Path) -> Result<BTreeMap<String, Vec<String>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut corrections = BTreeMap::new();
    for (n, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split('\t').collect();
        let [key, _, predicted, final_] = cells[..] else {
            bail!("{} line {}: expected 4 tab-separated columns", path.display(), n + 1);
        };
        if final_ != predicted {
            corrections.insert(key.to_string(), final_.split(' ').map(String::from).collect());
        }
    }
    Ok(corrections)
}

fn block(config: &CliConfig, command: BlockCommand, out: &mut impl Write) -> Result<()> {
    let dir = require(&config.store, "--store")?;
    match command {
        BlockCommand::Init { train, .. } => {
            let records = read_corpus(require(&config.corpus, "--corpus")?)?;
            let resources = config.resources()?;
            let (seed, _) = pairs_from_corpus(&read_corpus(&train)?, &resources.lexicon)?;
            let store = Store::create_with_resources(dir, records, seed, config.transducer, resources)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&store.model_summary(1))?)?;
        }
        BlockCommand::Make { size, .. } => {
            let summary = Store::open(dir)?.make_block(size)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        BlockCommand::Auto { id, .. } => {
            let summary = Store::open(dir)?.auto_annotate(id)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        BlockCommand::Export { id, format, out: path, .. } => {
            let store = Store::open(dir)?;
            let bytes = match format {
                ExportFormat::Corrections => corrections_sheet(&store, id)?.into_bytes(),
                ExportFormat::Tsv => write_tsv(&store.block(id)?.records)?,
                ExportFormat::Json => serde_json::to_vec_pretty(&store.payload(id)?)?,
            };
            emit(&path, &bytes, out)?;
        }
        BlockCommand::ImportCorrections { id, file, .. } => {
            let corrections = read_corrections(&file)?;
            let summary = Store::open(dir)?.post_corrections(id, &corrections)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        BlockCommand::Retrain { cv, .. } => {
            let summary = Store::open(dir)?.retrain(cv.map(|k| (k, config.seed)))?;
            writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        }
        BlockCommand::List { .. } => {
            for b in Store::open(dir)?.list_blocks() {
                let accuracy = b.accuracy.map_or_else(|| "-".to_string(), |a| format!("{}/{}", a.correct, a.total));
                writeln!(out, "{}\t{}\t{}\t{}\t{}", b.id, b.status, b.start, b.size, accuracy)?;
            }
        }
    }
    Ok(())
}

fn serve(config: &CliConfig, bind: SocketAddr) -> Result<()> {
    let store = Store::open(require(&config.store, "--store")?)?;
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(tarc_service::serve(store, bind)).map_err(|e| anyhow!("serving on {bind}: {e}"))
}
