//! Request and response bodies. All are plain JSON; field names below are
//! the wire names.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use tarc_core::corpus::TokenRecord;
use tarc_core::evaluation::BlockStatus;
use tarc_core::transliteration::TrainingStats;
use tarc_core::Accuracy;

pub const DEFAULT_BLOCK_SIZE: usize = 5_000;

/// Exact counts plus their ratio, for display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyView {
    pub correct: u64,
    pub total: u64,
    pub value: f64,
}

impl From<Accuracy> for AccuracyView {
    fn from(a: Accuracy) -> Self {
        Self { correct: a.correct, total: a.total, value: a.value::<f64>() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSummary {
    pub id: u32,
    pub status: BlockStatus,
    /// Offset of the first record in the corpus.
    pub start: usize,
    /// Number of records, component rows included.
    pub size: usize,
    /// Number of surface tokens, the unit accuracy is measured on.
    pub tokens: usize,
    pub accuracy: Option<AccuracyView>,
}

/// One record of a block, ready for a side-by-side diff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockRow {
    pub key: String,
    /// False for the component rows of a segmented token.
    pub surface: bool,
    pub arabish: String,
    pub tra: String,
    pub predicted: Vec<String>,
    #[serde(rename = "final")]
    pub finals: Vec<String>,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPayload {
    pub summary: BlockSummary,
    pub rows: Vec<BlockRow>,
    pub records: Vec<TokenRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewBlockRequest {
    #[serde(default = "default_block_size")]
    pub size: usize,
}

fn default_block_size() -> usize {
    DEFAULT_BLOCK_SIZE
}

/// Corrected morphemes keyed by surface-token key (`cor/textco/par/w`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorrectionsRequest {
    #[serde(default)]
    pub corrections: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvRequest {
    pub k: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RetrainRequest {
    /// Also cross-validate on the new training set.
    #[serde(default)]
    pub cv: Option<CvRequest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub version: u32,
    /// Training pairs used, after code-switch filtering.
    pub pairs: usize,
    pub previous_pairs: Option<usize>,
    pub blocks: Vec<u32>,
    pub stats: TrainingStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPoint {
    pub block: u32,
    pub accuracy: AccuracyView,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPoint {
    pub version: u32,
    pub pairs: usize,
    /// Corrected blocks included.
    pub blocks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvSummary {
    /// Model version whose training set was cross-validated.
    pub version: u32,
    pub k: usize,
    pub seed: u64,
    pub mean_accuracy: f64,
    pub pooled: AccuracyView,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Accuracy of the automatic annotation of each corrected block.
    pub blocks: Vec<BlockPoint>,
    /// Training-set size per model version.
    pub training: Vec<TrainingPoint>,
    pub cv: Option<CvSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    /// Stable machine-readable code, e.g. `unknown_block`.
    pub code: String,
    pub message: String,
}
