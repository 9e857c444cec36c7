//! Directory-backed corpus store.
//!
//! Layout of a store directory:
//!
//! ```text
//! initial.tsv      corpus as imported, never rewritten
//! corpus.tsv       current corpus
//! seed.json        training pairs of model version 1
//! store.json       manifest: blocks, model versions, last committed audit entry
//! audit.jsonl      one line per transcription change
//! models/v<N>.json trained models
//! ```
//!
//! Every mutation appends its audit entries first, then rewrites
//! `corpus.tsv`, then the manifest. The manifest is the commit point: on
//! open, audit entries past the manifest's sequence number are dropped and
//! the corpus is rebuilt by replaying the audit log over `initial.tsv`.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use tarc_core::corpus::{parse_tsv, surface_units, write_tsv, CorpusError, TokenRecord};
use tarc_core::evaluation::{kfold_cv, make_block, Block, BlockStatus, EvaluationError};
use tarc_core::transliteration::{Resources, TrainingPair, TrainingStats, TransliterationError};
use tarc_core::{Transducer, TransducerConfig};

use crate::api::{AccuracyView, BlockPayload, BlockPoint, BlockRow, BlockSummary, CvSummary, Metrics, ModelSummary, TrainingPoint};

const STORE_FORMAT: &str = "tarc-store";
const STORE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("no block with id {0}")]
    UnknownBlock(u32),
    #[error("no corrections since model version {0}; nothing new to train on")]
    NothingNew(u32),
    #[error("store directory {0} already holds a store")]
    AlreadyExists(PathBuf),
    #[error("store is inconsistent: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error(transparent)]
    Transliteration(#[from] TransliterationError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io { path: path.to_path_buf(), source }
}

fn json_err(path: &Path) -> impl FnOnce(serde_json::Error) -> StoreError + '_ {
    move |source| StoreError::Json { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditKind {
    Auto,
    Correction,
}

/// One change of one record's transcription.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub seq: u64,
    /// Milliseconds since the Unix epoch.
    pub timestamp: u64,
    pub kind: AuditKind,
    pub block: u32,
    /// Record key, `cor/textco/par/w`.
    pub key: String,
    pub before: String,
    pub after: String,
}

/// Replays audit entries over the imported records.
pub fn replay(initial: &[TokenRecord], audit: &[AuditEntry]) -> Result<Vec<TokenRecord>, StoreError> {
    let mut records = initial.to_vec();
    let index: HashMap<String, usize> = records.iter().enumerate().map(|(i, r)| (r.key(), i)).collect();
    for entry in audit {
        let Some(&i) = index.get(&entry.key) else {
            return Err(StoreError::Inconsistent(format!("audit entry {} names unknown record {}", entry.seq, entry.key)));
        };
        if records[i].tra != entry.before {
            return Err(StoreError::Inconsistent(format!(
                "audit entry {} expects {:?} at {}, found {:?}",
                entry.seq, entry.before, entry.key, records[i].tra
            )));
        }
        records[i].tra = entry.after.clone();
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct BlockEntry {
    /// The block as made, or after automatic annotation.
    base: Block,
    /// Accumulated corrections; present once the block has been corrected.
    corrections: Option<BTreeMap<String, Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ModelVersion {
    version: u32,
    pairs: usize,
    /// Corrected blocks whose pairs went into this version.
    blocks: Vec<u32>,
    /// Correction generation at training time.
    generation: u64,
    created: u64,
    stats: TrainingStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Manifest {
    format: String,
    version: u32,
    config: TransducerConfig,
    next_start: usize,
    /// Bumped by every accepted correction request.
    generation: u64,
    audit_seq: u64,
    blocks: Vec<BlockEntry>,
    models: Vec<ModelVersion>,
    cv: Option<CvSummary>,
}

/// Everything a retraining run needs, detached from the store so it can run
/// without holding a lock.
#[derive(Debug, Clone)]
pub struct RetrainJob {
    pub version: u32,
    pub pairs: Vec<TrainingPair>,
    pub blocks: Vec<u32>,
    pub generation: u64,
    pub config: TransducerConfig,
    pub resources: Resources,
    pub cv: Option<(usize, u64)>,
}

/// Output of [`RetrainJob::run`].
#[derive(Debug)]
pub struct Trained {
    pub job: RetrainJob,
    pub model: Transducer,
    pub cv: Option<CvSummary>,
}

impl RetrainJob {
    pub fn run(self) -> Result<Trained, StoreError> {
        let model = Transducer::train(&self.pairs, self.config, self.resources.clone())?;
        let cv = match self.cv {
            Some((k, seed)) => {
                let report = kfold_cv(&self.pairs, k, seed, self.config, &self.resources)?;
                Some(CvSummary {
                    version: self.version,
                    k,
                    seed,
                    mean_accuracy: report.mean_accuracy,
                    pooled: AccuracyView::from(report.pooled),
                })
            }
            None => None,
        };
        Ok(Trained { job: self, model, cv })
    }
}

#[derive(Debug)]
pub struct Store {
    dir: PathBuf,
    initial: Vec<TokenRecord>,
    records: Vec<TokenRecord>,
    seed: Vec<TrainingPair>,
    manifest: Manifest,
    /// Current view of every block, corrections applied.
    blocks: Vec<Block>,
    model: Arc<Transducer>,
    resources: Resources,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = File::create(&tmp).map_err(io_err(&tmp))?;
        f.write_all(bytes).map_err(io_err(&tmp))?;
        f.sync_all().map_err(io_err(&tmp))?;
    }
    fs::rename(&tmp, path).map_err(io_err(path))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, StoreError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(json_err(path))
}

fn read_audit(path: &Path) -> Result<Vec<AuditEntry>, StoreError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(StoreError::Io { path: path.to_path_buf(), source: e }),
    };
    let mut entries = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        // a torn last line from a crash is simply an uncommitted entry
        match serde_json::from_str::<AuditEntry>(&line) {
            Ok(e) => entries.push(e),
            Err(_) => break,
        }
    }
    Ok(entries)
}

fn derive_block(entry: &BlockEntry) -> Result<Block, StoreError> {
    match &entry.corrections {
        None => Ok(entry.base.clone()),
        Some(c) => Ok(entry.base.clone().ingest_corrections(c)?),
    }
}

impl Store {
    /// Creates a store in `dir` (created if needed, must not hold a store),
    /// training model version 1 on `seed` with the bundled resources.
    pub fn create(
        dir: impl AsRef<Path>,
        records: Vec<TokenRecord>,
        seed: Vec<TrainingPair>,
        config: TransducerConfig,
    ) -> Result<Self, StoreError> {
        Self::create_with_resources(dir, records, seed, config, Resources::bundled())
    }

    pub fn create_with_resources(
        dir: impl AsRef<Path>,
        records: Vec<TokenRecord>,
        seed: Vec<TrainingPair>,
        config: TransducerConfig,
        resources: Resources,
    ) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        if dir.join("store.json").exists() {
            return Err(StoreError::AlreadyExists(dir));
        }
        fs::create_dir_all(dir.join("models")).map_err(io_err(&dir))?;
        tarc_core::corpus::validate_records(&records)?;
        let model = Transducer::train(&seed, config, resources.clone())?;
        let tsv = write_tsv(&records)?;
        write_atomic(&dir.join("initial.tsv"), &tsv)?;
        write_atomic(&dir.join("corpus.tsv"), &tsv)?;
        let seed_path = dir.join("seed.json");
        write_atomic(&seed_path, &serde_json::to_vec_pretty(&seed).map_err(json_err(&seed_path))?)?;
        let model_path = dir.join("models").join("v1.json");
        model.save(&model_path)?;
        File::create(dir.join("audit.jsonl")).map_err(io_err(&dir))?;
        let manifest = Manifest {
            format: STORE_FORMAT.to_string(),
            version: STORE_VERSION,
            config,
            next_start: 0,
            generation: 0,
            audit_seq: 0,
            blocks: Vec::new(),
            models: vec![ModelVersion {
                version: 1,
                pairs: model.stats().pairs,
                blocks: Vec::new(),
                generation: 0,
                created: now_ms(),
                stats: model.stats().clone(),
            }],
            cv: None,
        };
        let store = Store {
            dir,
            initial: records.clone(),
            records,
            seed,
            manifest,
            blocks: Vec::new(),
            model: Arc::new(model),
            resources,
        };
        store.write_manifest()?;
        log::info!("created store at {} with {} records", store.dir.display(), store.records.len());
        Ok(store)
    }

    /// Opens a store, rolling back any mutation that did not reach the
    /// manifest. Opening twice in a row leaves the files unchanged.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        let manifest: Manifest = read_json(&dir.join("store.json"))?;
        if manifest.format != STORE_FORMAT || manifest.version != STORE_VERSION {
            return Err(StoreError::Inconsistent(format!(
                "unsupported store format {} v{}",
                manifest.format, manifest.version
            )));
        }
        let initial_path = dir.join("initial.tsv");
        let initial = parse_tsv(&fs::read(&initial_path).map_err(io_err(&initial_path))?)?;
        let seed: Vec<TrainingPair> = read_json(&dir.join("seed.json"))?;

        let audit_path = dir.join("audit.jsonl");
        let mut audit = read_audit(&audit_path)?;
        let committed = audit.iter().take_while(|e| e.seq <= manifest.audit_seq).count();
        if committed < audit.len() || audit.last().map_or(0, |e| e.seq) != manifest.audit_seq {
            audit.truncate(committed);
            if audit.last().map_or(0, |e| e.seq) != manifest.audit_seq {
                return Err(StoreError::Inconsistent("audit log is missing committed entries".into()));
            }
            log::warn!("dropping uncommitted audit entries");
            let mut text = String::new();
            for e in &audit {
                text.push_str(&serde_json::to_string(e).map_err(json_err(&audit_path))?);
                text.push('\n');
            }
            write_atomic(&audit_path, text.as_bytes())?;
        }
        let records = replay(&initial, &audit)?;
        let corpus_path = dir.join("corpus.tsv");
        let on_disk = fs::read(&corpus_path).ok().and_then(|b| parse_tsv(&b).ok());
        if on_disk.as_ref() != Some(&records) {
            log::warn!("rebuilding corpus.tsv from the audit log");
            write_atomic(&corpus_path, &write_tsv(&records)?)?;
        }

        let blocks = manifest.blocks.iter().map(derive_block).collect::<Result<Vec<_>, _>>()?;
        for block in &blocks {
            if records.get(block.start..block.start + block.records.len()) != Some(&block.records[..]) {
                return Err(StoreError::Inconsistent(format!("block {} disagrees with the corpus", block.id)));
            }
        }
        let latest = manifest.models.last().map_or(1, |m| m.version);
        let model = Transducer::load(&dir.join("models").join(format!("v{latest}.json")))?;
        let resources = model.resources().clone();
        Ok(Store { dir, initial, records, seed, manifest, blocks, model: Arc::new(model), resources })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn records(&self) -> &[TokenRecord] {
        &self.records
    }

    pub fn initial_records(&self) -> &[TokenRecord] {
        &self.initial
    }

    pub fn model(&self) -> Arc<Transducer> {
        Arc::clone(&self.model)
    }

    pub fn model_version(&self) -> u32 {
        self.manifest.models.last().map_or(1, |m| m.version)
    }

    pub fn config(&self) -> TransducerConfig {
        self.manifest.config
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, id: u32) -> Result<&Block, StoreError> {
        self.blocks.iter().find(|b| b.id == id).ok_or(StoreError::UnknownBlock(id))
    }

    fn entry_index(&self, id: u32) -> Result<usize, StoreError> {
        self.manifest.blocks.iter().position(|b| b.base.id == id).ok_or(StoreError::UnknownBlock(id))
    }

    /// Records not yet assigned to any block.
    pub fn remaining(&self) -> usize {
        self.records.len() - self.manifest.next_start
    }

    pub fn audit(&self) -> Result<Vec<AuditEntry>, StoreError> {
        let mut entries = read_audit(&self.dir.join("audit.jsonl"))?;
        entries.retain(|e| e.seq <= self.manifest.audit_seq);
        Ok(entries)
    }

    fn write_manifest(&self) -> Result<(), StoreError> {
        let path = self.dir.join("store.json");
        let bytes = serde_json::to_vec_pretty(&self.manifest).map_err(json_err(&path))?;
        write_atomic(&path, &bytes)
    }

    /// Appends audit entries for every record whose transcription differs
    /// between `old` and `new`, plus `touched` keys even when unchanged.
    fn log_changes(
        &mut self,
        kind: AuditKind,
        block: u32,
        old: &[TokenRecord],
        new: &[TokenRecord],
        touched: &[String],
    ) -> Result<(), StoreError> {
        let path = self.dir.join("audit.jsonl");
        let timestamp = now_ms();
        let mut lines = String::new();
        let mut seq = self.manifest.audit_seq;
        for (a, b) in old.iter().zip(new) {
            let key = a.key();
            if a.tra != b.tra || touched.contains(&key) {
                seq += 1;
                let entry = AuditEntry {
                    seq,
                    timestamp,
                    kind,
                    block,
                    key,
                    before: a.tra.clone(),
                    after: b.tra.clone(),
                };
                lines.push_str(&serde_json::to_string(&entry).map_err(json_err(&path))?);
                lines.push('\n');
            }
        }
        if !lines.is_empty() {
            let mut f = OpenOptions::new().append(true).create(true).open(&path).map_err(io_err(&path))?;
            f.write_all(lines.as_bytes()).map_err(io_err(&path))?;
            f.sync_all().map_err(io_err(&path))?;
        }
        self.manifest.audit_seq = seq;
        Ok(())
    }

    /// Writes `block` over its records, logs the changes and commits.
    fn commit_block(&mut self, index: usize, entry: BlockEntry, kind: AuditKind, touched: &[String]) -> Result<(), StoreError> {
        let block = derive_block(&entry)?;
        let range = block.start..block.start + block.records.len();
        let old = self.records[range.clone()].to_vec();
        let saved = self.manifest.clone();
        self.log_changes(kind, block.id, &old, &block.records, touched)?;
        self.records[range].clone_from_slice(&block.records);
        if index == self.manifest.blocks.len() {
            self.manifest.blocks.push(entry);
            self.blocks.push(block);
        } else {
            self.manifest.blocks[index] = entry;
            self.blocks[index] = block;
        }
        let result = write_tsv(&self.records).map_err(StoreError::from).and_then(|tsv| {
            write_atomic(&self.dir.join("corpus.tsv"), &tsv)?;
            self.write_manifest()
        });
        if result.is_err() {
            // in-memory state follows the last commit; the disk is repaired on open
            self.manifest = saved;
            self.records = replay(&self.initial, &self.audit()?)?;
            self.blocks = self.manifest.blocks.iter().map(derive_block).collect::<Result<_, _>>()?;
        }
        result
    }

    /// Cuts the next block of up to `size` records from the stream.
    pub fn make_block(&mut self, size: usize) -> Result<BlockSummary, StoreError> {
        let id = self.manifest.blocks.iter().map(|b| b.base.id).max().unwrap_or(0) + 1;
        let block = make_block(&self.records, self.manifest.next_start, size, id)?;
        let previous = self.manifest.next_start;
        let index = self.manifest.blocks.len();
        self.manifest.next_start = block.start + block.records.len();
        if let Err(e) = self.commit_block(index, BlockEntry { base: block, corrections: None }, AuditKind::Auto, &[]) {
            self.manifest.next_start = previous;
            return Err(e);
        }
        self.summary(id)
    }

    /// A raw block ready for [`Store::commit_auto`], with the model to run.
    pub fn prepare_auto(&self, id: u32) -> Result<(Block, Arc<Transducer>), StoreError> {
        let block = self.block(id)?;
        if block.status != BlockStatus::Raw {
            return Err(EvaluationError::WrongStatus { id, expected: BlockStatus::Raw, found: block.status }.into());
        }
        Ok((block.clone(), self.model()))
    }

    pub fn commit_auto(&mut self, annotated: Block) -> Result<BlockSummary, StoreError> {
        let index = self.entry_index(annotated.id)?;
        let current = &self.blocks[index];
        if current.status != BlockStatus::Raw {
            let found = current.status;
            return Err(EvaluationError::WrongStatus { id: annotated.id, expected: BlockStatus::Raw, found }.into());
        }
        let id = annotated.id;
        self.commit_block(index, BlockEntry { base: annotated, corrections: None }, AuditKind::Auto, &[])?;
        self.summary(id)
    }

    /// Runs the current model over a raw block.
    pub fn auto_annotate(&mut self, id: u32) -> Result<BlockSummary, StoreError> {
        let (block, model) = self.prepare_auto(id)?;
        let annotated = block.auto_annotate(model.as_ref())?;
        self.commit_auto(annotated)
    }

    /// Applies corrections to an automatically annotated block. A corrected
    /// block accepts further corrections: later writes to the same key win
    /// and accuracy is recomputed against the automatic predictions.
    pub fn post_corrections(
        &mut self,
        id: u32,
        corrections: &BTreeMap<String, Vec<String>>,
    ) -> Result<BlockSummary, StoreError> {
        let index = self.entry_index(id)?;
        let entry = &self.manifest.blocks[index];
        if entry.base.status != BlockStatus::Auto {
            let found = entry.base.status;
            return Err(EvaluationError::WrongStatus { id, expected: BlockStatus::Auto, found }.into());
        }
        let mut merged = entry.corrections.clone().unwrap_or_default();
        merged.extend(corrections.iter().map(|(k, v)| (k.clone(), v.clone())));
        let next = BlockEntry { base: entry.base.clone(), corrections: Some(merged) };
        // validates keys and morphemes before anything is written
        derive_block(&next)?;
        let touched: Vec<String> = corrections.keys().cloned().collect();
        let generation = self.manifest.generation;
        self.manifest.generation += 1;
        if let Err(e) = self.commit_block(index, next, AuditKind::Correction, &touched) {
            self.manifest.generation = generation;
            return Err(e);
        }
        self.summary(id)
    }

    fn corrected_pairs(&self) -> (Vec<TrainingPair>, Vec<u32>) {
        let mut pairs = Vec::new();
        let mut ids = Vec::new();
        for block in self.blocks.iter().filter(|b| b.status == BlockStatus::Corrected) {
            pairs.extend(block.training_pairs(&self.resources));
            ids.push(block.id);
        }
        (pairs, ids)
    }

    /// Training data for the next model version: the seed pairs plus every
    /// corrected block.
    pub fn prepare_retrain(&self, cv: Option<(usize, u64)>) -> Result<RetrainJob, StoreError> {
        let latest = self.manifest.models.last().expect("store always has a model");
        if latest.generation == self.manifest.generation {
            return Err(StoreError::NothingNew(latest.version));
        }
        let (block_pairs, blocks) = self.corrected_pairs();
        let mut pairs = self.seed.clone();
        pairs.extend(block_pairs);
        Ok(RetrainJob {
            version: latest.version + 1,
            pairs,
            blocks,
            generation: self.manifest.generation,
            config: self.manifest.config,
            resources: self.resources.clone(),
            cv,
        })
    }

    pub fn commit_retrain(&mut self, trained: Trained) -> Result<ModelSummary, StoreError> {
        let Trained { job, model, cv } = trained;
        let latest = self.model_version();
        if job.version != latest + 1 || job.generation != self.manifest.generation {
            return Err(StoreError::Inconsistent("store changed while retraining".into()));
        }
        let path = self.dir.join("models").join(format!("v{}.json", job.version));
        model.save(&path)?;
        let previous = self.manifest.models.last().map(|m| m.pairs);
        let saved = self.manifest.clone();
        self.manifest.models.push(ModelVersion {
            version: job.version,
            pairs: model.stats().pairs,
            blocks: job.blocks,
            generation: job.generation,
            created: now_ms(),
            stats: model.stats().clone(),
        });
        if cv.is_some() {
            self.manifest.cv = cv;
        }
        if let Err(e) = self.write_manifest() {
            self.manifest = saved;
            return Err(e);
        }
        self.model = Arc::new(model);
        log::info!("model version {} trained on {} pairs", job.version, self.model.stats().pairs);
        let mut summary = self.model_summary(job.version).expect("just added");
        summary.previous_pairs = previous;
        Ok(summary)
    }

    pub fn retrain(&mut self, cv: Option<(usize, u64)>) -> Result<ModelSummary, StoreError> {
        let trained = self.prepare_retrain(cv)?.run()?;
        self.commit_retrain(trained)
    }

    pub fn model_summary(&self, version: u32) -> Option<ModelSummary> {
        let i = self.manifest.models.iter().position(|m| m.version == version)?;
        let m = &self.manifest.models[i];
        Some(ModelSummary {
            version: m.version,
            pairs: m.pairs,
            previous_pairs: i.checked_sub(1).map(|p| self.manifest.models[p].pairs),
            blocks: m.blocks.clone(),
            stats: m.stats.clone(),
        })
    }

    pub fn summary(&self, id: u32) -> Result<BlockSummary, StoreError> {
        let block = self.block(id)?;
        Ok(BlockSummary {
            id: block.id,
            status: block.status,
            start: block.start,
            size: block.records.len(),
            tokens: surface_units(&block.records).len(),
            accuracy: block.accuracy.map(AccuracyView::from),
        })
    }

    pub fn list_blocks(&self) -> Vec<BlockSummary> {
        self.blocks.iter().map(|b| self.summary(b.id).expect("listed block exists")).collect()
    }

    pub fn payload(&self, id: u32) -> Result<BlockPayload, StoreError> {
        let block = self.block(id)?;
        let surface: Vec<usize> = surface_units(&block.records).into_iter().map(|(i, _)| i).collect();
        let rows = block
            .records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let predicted = block.auto_predictions.get(i).cloned().unwrap_or_default();
                let finals = block.finals.get(i).cloned().unwrap_or_default();
                BlockRow {
                    key: r.key(),
                    surface: surface.contains(&i),
                    arabish: r.arabish.clone(),
                    tra: r.tra.clone(),
                    changed: !finals.is_empty() && finals != predicted,
                    predicted,
                    finals,
                }
            })
            .collect();
        Ok(BlockPayload { summary: self.summary(id)?, rows, records: block.records.clone() })
    }

    pub fn metrics(&self) -> Metrics {
        let blocks = self
            .blocks
            .iter()
            .filter_map(|b| {
                b.accuracy.map(|a| BlockPoint { block: b.id, accuracy: AccuracyView::from(a) })
            })
            .collect();
        let training = self
            .manifest
            .models
            .iter()
            .map(|m| TrainingPoint { version: m.version, pairs: m.pairs, blocks: m.blocks.len() })
            .collect();
        Metrics { blocks, training, cv: self.manifest.cv.clone() }
    }

    /// Current corpus in the 12-column TSV format.
    pub fn export_tsv(&self) -> Result<Vec<u8>, StoreError> {
        Ok(write_tsv(&self.records)?)
    }
}
