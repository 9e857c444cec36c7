//! Trainable Arabish to Arabic-morpheme transducer.
//!
//! Candidates come from clitic segmentation times the code-system lattice of
//! the stem. Each candidate is scored as
//! `λ · channel + (1 − λ) · lm`, where `channel` sums learned log
//! `P(arabic | unit)` over stem units and `lm` is a smoothed morpheme n-gram
//! log-probability of the whole morpheme sequence.

mod align;
mod candidates;
mod channel;
mod lm;
mod model;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::code_system::MappingTable;
use crate::corpus::{reconstruct_sentences, surface_units, CorpusError, TokenRecord, MISSING};
use crate::normalization::{detect_code_switch, filter_code_switch_sentences, ExceptionLexicon};
use crate::scalar::{Accuracy, Scalar};
use crate::segmentation::CliticInventory;

pub use align::{align_pair, Alignment};
pub use candidates::{Branch, CandidateSpace};
pub use channel::Channel;
pub use lm::NgramLm;
pub use model::{TrainingStats, TransducerModel, MODEL_FORMAT, MODEL_VERSION};

#[derive(Debug, Error)]
pub enum TransliterationError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("empty token")]
    EmptyToken,
    #[error("invalid training pair: {0}")]
    InvalidPair(String),
    #[error("predictions and golds differ in length ({predictions} vs {golds})")]
    LengthMismatch { predictions: usize, golds: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One Arabish surface token with its gold Arabic morphemes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrainingPair {
    pub arabish: String,
    pub arabic_morphemes: Vec<String>,
}

impl TrainingPair {
    pub fn new(arabish: &str, arabic_morphemes: Vec<String>) -> Result<Self, TransliterationError> {
        if arabish.is_empty() {
            return Err(TransliterationError::InvalidPair("empty arabish".into()));
        }
        if arabic_morphemes.is_empty() || arabic_morphemes.iter().any(String::is_empty) {
            return Err(TransliterationError::InvalidPair(format!("{arabish}: empty morpheme list or morpheme")));
        }
        Ok(Self { arabish: arabish.to_string(), arabic_morphemes })
    }

    pub fn single(arabish: &str, arabic: &str) -> Result<Self, TransliterationError> {
        Self::new(arabish, vec![arabic.to_string()])
    }
}

/// Linguistic resources used for candidate generation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Resources {
    pub table: MappingTable,
    pub clitics: CliticInventory,
    pub lexicon: ExceptionLexicon,
}

impl Resources {
    /// Bundled mapping table, clitic inventory and seed exception lexicon.
    pub fn bundled() -> Self {
        Self {
            table: MappingTable::default(),
            clitics: CliticInventory::default(),
            lexicon: ExceptionLexicon::seed(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct TransducerConfig<F: Scalar> {
    /// Morpheme n-gram order.
    pub order: usize,
    /// Add-k smoothing constant for both the channel and the language model.
    pub add_k: F,
    /// Number of ranked candidates kept (best plus alternatives).
    pub beam_width: usize,
    /// Weight of the channel score against the language model.
    pub lattice_weight: F,
    /// Log-score charged for a unit passed through verbatim.
    pub unknown_penalty: F,
    /// Hard cap on search expansions per token.
    pub max_expansions: usize,
}

impl<F: Scalar> Default for TransducerConfig<F> {
    fn default() -> Self {
        Self {
            order: 2,
            add_k: F::lit(0.1),
            beam_width: 16,
            lattice_weight: F::lit(0.5),
            unknown_penalty: F::lit(-10.0),
            max_expansions: 200_000,
        }
    }
}

impl<F: Scalar> TransducerConfig<F> {
    pub fn validate(&self) -> Result<(), TransliterationError> {
        let bad = |m: &str| Err(TransliterationError::Config(m.to_string()));
        if self.order < 1 {
            return bad("n-gram order must be at least 1");
        }
        if !(self.add_k > F::zero()) {
            return bad("add-k constant must be positive");
        }
        if self.beam_width < 1 {
            return bad("beam width must be at least 1");
        }
        if !(self.lattice_weight >= F::zero() && self.lattice_weight <= F::one()) {
            return bad("lattice weight must lie in [0, 1]");
        }
        if !(self.unknown_penalty <= F::zero()) {
            return bad("unknown penalty must be a non-positive log-score");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionSource {
    /// Seen in training; most frequent gold sequence.
    Lexicon,
    /// Foreign word kept as written.
    CodeSwitch,
    /// Ranked over the candidate space.
    Search,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct Prediction<F: Scalar> {
    pub morphemes: Vec<String>,
    pub score: F,
    /// Next best candidates, best first.
    pub alternatives: Vec<(Vec<String>, F)>,
    pub source: PredictionSource,
}

/// Fraction of positions whose full morpheme sequence matches exactly.
pub fn token_accuracy(predictions: &[Vec<String>], golds: &[Vec<String>]) -> Result<Accuracy, TransliterationError> {
    if predictions.len() != golds.len() {
        return Err(TransliterationError::LengthMismatch { predictions: predictions.len(), golds: golds.len() });
    }
    let correct = predictions.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(Accuracy::new(correct as u64, golds.len() as u64))
}

/// Gold morphemes of one surface unit: its component transcriptions, or its
/// own transcription when it was not segmented.
pub fn unit_morphemes(parent: &TokenRecord, components: &[TokenRecord]) -> Vec<String> {
    if components.is_empty() {
        vec![parent.tra.clone()]
    } else {
        components.iter().map(|c| c.tra.clone()).collect()
    }
}

/// Training pairs of a file-ordered record list, one per transcribed surface
/// token. Code-switched tokens are skipped.
pub fn pairs_from_records(records: &[TokenRecord], lex: &ExceptionLexicon) -> Vec<TrainingPair> {
    surface_units(records)
        .into_iter()
        .filter_map(|(i, components)| {
            let parent = &records[i];
            let morphemes = unit_morphemes(parent, &records[components]);
            if parent.arabish == MISSING || morphemes.iter().any(|m| m == MISSING || m.is_empty()) {
                return None;
            }
            if detect_code_switch(&parent.arabish, lex) {
                return None;
            }
            TrainingPair::new(&parent.arabish, morphemes).ok()
        })
        .collect()
}

/// Training pairs after dropping whole sentences that contain a
/// code-switched token. Returns the pairs and the number of removed sentences.
pub fn pairs_from_corpus(
    records: &[TokenRecord],
    lex: &ExceptionLexicon,
) -> Result<(Vec<TrainingPair>, usize), TransliterationError> {
    let sentences = reconstruct_sentences(records)?;
    let (kept, removed) = filter_code_switch_sentences(sentences, lex);
    let pairs = kept
        .iter()
        .flat_map(|s| s.tokens.iter())
        .filter_map(|t| {
            let morphemes = unit_morphemes(&t.token, &t.components);
            if t.token.arabish == MISSING || morphemes.iter().any(|m| m == MISSING || m.is_empty()) {
                return None;
            }
            TrainingPair::new(&t.token.arabish, morphemes).ok()
        })
        .collect();
    Ok((pairs, removed.len()))
}
