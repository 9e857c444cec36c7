//! Tunisian Arabish to Arabic-script transcription.
//!
//! The pipeline: parse and validate the 12-column corpus ([`corpus`]),
//! normalize Latin-script tokens ([`normalization`]), split off clitics
//! ([`segmentation`]), expand grapheme lattices ([`code_system`]), rank
//! candidates with a trained transducer ([`transliteration`]) and measure it
//! by cross-validation or block-by-block annotation ([`evaluation`]).
//! [`collection`] covers keyword-driven text gathering and author metadata.
//!
//! Scores are generic over [`scalar::Scalar`]; the aliases below fix `f64`.

pub mod code_system;
pub mod collection;
pub mod corpus;
pub mod evaluation;
pub mod normalization;
pub mod scalar;
pub mod segmentation;
pub mod transliteration;

pub use code_system::{contains_path, expand, Lattice, MappingTable};
pub use corpus::{parse_tsv, write_tsv, CorpusError, TokenIndex, TokenRecord};
pub use evaluation::{kfold_cv, make_block, Block, BlockStatus, EvaluationError, FoldPlan};
pub use normalization::{normalize, ExceptionLexicon, NormalizationReport};
pub use scalar::{Accuracy, Scalar};
pub use segmentation::{segment, CliticInventory, Segmentation};
pub use transliteration::{Resources, TrainingPair, TransliterationError};

/// Transducer with `f64` scores.
pub type Transducer = transliteration::TransducerModel<f64>;
/// Transducer with `f32` scores, half the memory for large models.
pub type TransducerF32 = transliteration::TransducerModel<f32>;
pub type TransducerConfig = transliteration::TransducerConfig<f64>;
pub type Prediction = transliteration::Prediction<f64>;
pub type CvReport = evaluation::CvReport<f64>;
