//! Cross-validation harness and the block annotation loop.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{surface_units, TokenIndex, TokenRecord, MISSING};
use crate::normalization::detect_code_switch;
use crate::scalar::{Accuracy, Scalar};
use crate::segmentation::fuse_morphemes;
use crate::transliteration::{
    token_accuracy, unit_morphemes, Resources, TrainingPair, TransducerConfig, TransducerModel, TransliterationError,
};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("k must be at least 2, got {0}")]
    FoldCount(usize),
    #[error("{pairs} items cannot fill {k} folds")]
    TooFewItems { pairs: usize, k: usize },
    #[error("block size must be at least 1")]
    BlockSize,
    #[error("no records remain")]
    Exhausted,
    #[error("block {id} is {found}, expected {expected}")]
    WrongStatus { id: u32, expected: BlockStatus, found: BlockStatus },
    #[error("correction key {0:?} is not a token of this block")]
    UnknownKey(String),
    #[error("correction for {0:?} has an empty morpheme")]
    EmptyCorrection(String),
    #[error(transparent)]
    Transliteration(#[from] TransliterationError),
}

/// Assignment of items to `k` folds after a seeded shuffle.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold id of every item, by item index.
    pub assignments: Vec<usize>,
}

impl FoldPlan {
    /// Shuffles item indices and deals them round-robin, so fold sizes differ
    /// by at most one.
    pub fn new(n: usize, k: usize, seed: u64) -> Result<Self, EvaluationError> {
        check_folds(n, k)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut assignments = vec![0; n];
        for (position, &item) in order.iter().enumerate() {
            assignments[item] = position % k;
        }
        Ok(Self { k, seed, assignments })
    }

    /// Keeps items of the same group (e.g. sentence) in the same fold. Groups
    /// are shuffled and each goes to the currently smallest fold.
    pub fn grouped(groups: &[u64], k: usize, seed: u64) -> Result<Self, EvaluationError> {
        check_folds(groups.len(), k)?;
        let mut members: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, g) in groups.iter().enumerate() {
            members.entry(*g).or_default().push(i);
        }
        if members.len() < k {
            return Err(EvaluationError::TooFewItems { pairs: members.len(), k });
        }
        let mut order: Vec<Vec<usize>> = members.into_values().collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut sizes = vec![0usize; k];
        let mut assignments = vec![0; groups.len()];
        for group in order {
            let fold = (0..k).min_by_key(|&f| (sizes[f], f)).expect("k >= 2");
            sizes[fold] += group.len();
            for i in group {
                assignments[i] = fold;
            }
        }
        Ok(Self { k, seed, assignments })
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len()).filter(|&i| self.assignments[i] != fold).collect()
    }
}

fn check_folds(n: usize, k: usize) -> Result<(), EvaluationError> {
    if k < 2 {
        return Err(EvaluationError::FoldCount(k));
    }
    if n < k {
        return Err(EvaluationError::TooFewItems { pairs: n, k });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub accuracy: Accuracy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
pub struct CvReport<F: Scalar> {
    pub k: usize,
    pub seed: u64,
    pub grouped: bool,
    pub config: TransducerConfig<F>,
    pub folds: Vec<FoldResult>,
    /// Unweighted mean of the per-fold accuracies.
    pub mean_accuracy: F,
    /// All scored test items pooled.
    pub pooled: Accuracy,
}

impl<F: Scalar> CvReport<F> {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "k={} seed={} grouped={}", self.k, self.seed, self.grouped);
        let c = &self.config;
        let _ = writeln!(
            out,
            "order={} add_k={} beam_width={} lattice_weight={}",
            c.order, c.add_k, c.beam_width, c.lattice_weight
        );
        for f in &self.folds {
            let _ = writeln!(
                out,
                "fold {:>2}  train {:>6}  test {:>6}  accuracy {:.4} ({})",
                f.fold,
                f.train_size,
                f.test_size,
                f.accuracy.value::<f64>(),
                f.accuracy
            );
        }
        let _ = writeln!(out, "mean accuracy {:.4}", self.mean_accuracy.to_f64().unwrap_or(f64::NAN));
        let _ = writeln!(out, "pooled accuracy {:.4} ({})", self.pooled.value::<f64>(), self.pooled);
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// k-fold cross-validation over token pairs with a shuffled fold plan.
pub fn kfold_cv<F: Scalar>(
    pairs: &[TrainingPair],
    k: usize,
    seed: u64,
    config: TransducerConfig<F>,
    resources: &Resources,
) -> Result<CvReport<F>, EvaluationError> {
    let plan = FoldPlan::new(pairs.len(), k, seed)?;
    run_cv(pairs, &plan, false, config, resources, |_| true)
}

/// Cross-validation over an explicit plan. Every fold trains on all of its
/// training items, but only test items accepted by `scored` count towards
/// accuracy.
pub fn run_cv<F: Scalar, S>(
    pairs: &[TrainingPair],
    plan: &FoldPlan,
    grouped: bool,
    config: TransducerConfig<F>,
    resources: &Resources,
    scored: S,
) -> Result<CvReport<F>, EvaluationError>
where
    S: Fn(usize) -> bool + Sync,
{
    if plan.assignments.len() != pairs.len() {
        return Err(EvaluationError::TooFewItems { pairs: pairs.len(), k: plan.k });
    }
    let folds: Vec<FoldResult> = (0..plan.k)
        .into_par_iter()
        .map(|fold| -> Result<FoldResult, EvaluationError> {
            let train: Vec<TrainingPair> = plan.train_indices(fold).into_iter().map(|i| pairs[i].clone()).collect();
            let test: Vec<usize> = plan.test_indices(fold).into_iter().filter(|&i| scored(i)).collect();
            let model = TransducerModel::train(&train, config, resources.clone())?;
            let mut predictions = Vec::with_capacity(test.len());
            for &i in &test {
                predictions.push(model.predict(&pairs[i].arabish, false)?.morphemes);
            }
            let golds: Vec<Vec<String>> = test.iter().map(|&i| pairs[i].arabic_morphemes.clone()).collect();
            let accuracy = token_accuracy(&predictions, &golds)?;
            log::info!("fold {fold}: {accuracy}");
            Ok(FoldResult { fold, train_size: train.len(), test_size: test.len(), accuracy })
        })
        .collect::<Result<_, _>>()?;
    let mean_accuracy =
        folds.iter().fold(F::zero(), |acc, f| acc + f.accuracy.value::<F>()) / F::from_count(folds.len() as u64);
    let pooled = folds.iter().fold(Accuracy::new(0, 0), |acc, f| acc.merge(f.accuracy));
    Ok(CvReport { k: plan.k, seed: plan.seed, grouped, config, folds, mean_accuracy, pooled })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockStatus {
    Raw,
    Auto,
    Corrected,
}

impl std::fmt::Display for BlockStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            BlockStatus::Raw => "raw",
            BlockStatus::Auto => "auto",
            BlockStatus::Corrected => "corrected",
        })
    }
}

/// A contiguous slice of the corpus stream going through annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub id: u32,
    /// Position of the first record in the stream.
    pub start: usize,
    pub records: Vec<TokenRecord>,
    pub status: BlockStatus,
    /// One entry per record. Surface tokens carry their predicted morphemes;
    /// component rows carry their own morpheme when the prediction has one
    /// per component, otherwise nothing.
    pub auto_predictions: Vec<Vec<String>>,
    /// Final morphemes per record after correction, same layout.
    pub finals: Vec<Vec<String>>,
    pub accuracy: Option<Accuracy>,
}

/// Takes the next `size` records from `start`, fewer at the end of the
/// stream, never splitting a range row from its components.
pub fn make_block(records: &[TokenRecord], start: usize, size: usize, id: u32) -> Result<Block, EvaluationError> {
    if size == 0 {
        return Err(EvaluationError::BlockSize);
    }
    if start >= records.len() {
        return Err(EvaluationError::Exhausted);
    }
    let mut end = (start + size).min(records.len());
    // extend while the next record is a component of an earlier range row
    let mut covered_until: Option<(usize, u32)> = None;
    for (i, r) in records.iter().enumerate().take(end).skip(start) {
        if let TokenIndex::Range(_, hi) = r.w {
            covered_until = Some((i, hi));
        }
    }
    if let Some((parent, hi)) = covered_until {
        let key = records[parent].sentence_key();
        while end < records.len() {
            let next = &records[end];
            if next.sentence_key() == key && !next.w.is_range() && next.w.lo() <= hi && end > parent {
                end += 1;
            } else {
                break;
            }
        }
    }
    Ok(Block {
        id,
        start,
        records: records[start..end].to_vec(),
        status: BlockStatus::Raw,
        auto_predictions: Vec::new(),
        finals: Vec::new(),
        accuracy: None,
    })
}

/// Cuts a whole stream into consecutive blocks.
pub fn partition_blocks(records: &[TokenRecord], size: usize) -> Result<Vec<Block>, EvaluationError> {
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let block = make_block(records, start, size, blocks.len() as u32 + 1)?;
        start += block.records.len();
        blocks.push(block);
    }
    Ok(blocks)
}

fn layout(records: &[TokenRecord], unit: &[(usize, std::ops::Range<usize>)], per_unit: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new(); records.len()];
    for ((parent, components), morphemes) in unit.iter().zip(per_unit) {
        out[*parent] = morphemes.clone();
        if components.len() == morphemes.len() {
            for (c, m) in components.clone().zip(morphemes) {
                out[c] = vec![m.clone()];
            }
        }
    }
    out
}

fn write_transcriptions(records: &mut [TokenRecord], per_record: &[Vec<String>]) {
    for (record, morphemes) in records.iter_mut().zip(per_record) {
        if !morphemes.is_empty() {
            record.tra = fuse_morphemes(morphemes);
        }
    }
}

impl Block {
    /// Indices of surface tokens with the range of their component rows.
    pub fn surface_units(&self) -> Vec<(usize, std::ops::Range<usize>)> {
        surface_units(&self.records)
    }

    pub fn surface_keys(&self) -> Vec<String> {
        self.surface_units().into_iter().map(|(i, _)| self.records[i].key()).collect()
    }

    fn surface_column(&self, column: &[Vec<String>]) -> Vec<Vec<String>> {
        self.surface_units().into_iter().map(|(i, _)| column[i].clone()).collect()
    }

    pub fn surface_predictions(&self) -> Vec<Vec<String>> {
        self.surface_column(&self.auto_predictions)
    }

    pub fn surface_finals(&self) -> Vec<Vec<String>> {
        self.surface_column(&self.finals)
    }

    fn expect_status(&self, expected: BlockStatus) -> Result<(), EvaluationError> {
        if self.status != expected {
            return Err(EvaluationError::WrongStatus { id: self.id, expected, found: self.status });
        }
        Ok(())
    }

    /// Predicts every surface token and writes provisional transcriptions.
    pub fn auto_annotate<F: Scalar>(mut self, model: &TransducerModel<F>) -> Result<Block, EvaluationError> {
        self.expect_status(BlockStatus::Raw)?;
        let units = self.surface_units();
        let predicted: Vec<Vec<String>> = units
            .par_iter()
            .map(|(i, _)| model.predict(&self.records[*i].arabish, false).map(|p| p.morphemes))
            .collect::<Result<_, _>>()?;
        self.auto_predictions = layout(&self.records, &units, &predicted);
        write_transcriptions(&mut self.records, &self.auto_predictions);
        self.status = BlockStatus::Auto;
        Ok(self)
    }

    /// Applies corrections keyed by surface-token key (`cor/textco/par/w`).
    /// Tokens without a correction keep their prediction.
    pub fn ingest_corrections(mut self, corrections: &BTreeMap<String, Vec<String>>) -> Result<Block, EvaluationError> {
        self.expect_status(BlockStatus::Auto)?;
        let units = self.surface_units();
        let keys: Vec<String> = units.iter().map(|(i, _)| self.records[*i].key()).collect();
        for (key, morphemes) in corrections {
            if !keys.contains(key) {
                return Err(EvaluationError::UnknownKey(key.clone()));
            }
            if morphemes.is_empty() || morphemes.iter().any(|m| m.is_empty()) {
                return Err(EvaluationError::EmptyCorrection(key.clone()));
            }
        }
        let predicted = self.surface_predictions();
        let finals: Vec<Vec<String>> = keys
            .iter()
            .zip(&predicted)
            .map(|(key, p)| corrections.get(key).cloned().unwrap_or_else(|| p.clone()))
            .collect();
        self.accuracy = Some(token_accuracy(&predicted, &finals)?);
        self.finals = layout(&self.records, &units, &finals);
        write_transcriptions(&mut self.records, &self.finals);
        self.status = BlockStatus::Corrected;
        Ok(self)
    }

    /// Training pairs contributed by a corrected block.
    pub fn training_pairs(&self, resources: &Resources) -> Vec<TrainingPair> {
        if self.status != BlockStatus::Corrected {
            return Vec::new();
        }
        self.surface_units()
            .into_iter()
            .filter_map(|(i, components)| {
                let record = &self.records[i];
                let finals = if self.finals[i].is_empty() {
                    unit_morphemes(record, &self.records[components])
                } else {
                    self.finals[i].clone()
                };
                if record.arabish == MISSING || detect_code_switch(&record.arabish, &resources.lexicon) {
                    return None;
                }
                TrainingPair::new(&record.arabish, finals).ok()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stream(n: usize) -> Vec<TokenRecord> {
        (0..n).map(|i| TokenRecord::unannotated("3fE", "t", (i / 10) as u32 + 1, (i % 10) as u32 + 1, "w")).collect()
    }

    #[test]
    fn fold_plan_balanced() {
        let plan = FoldPlan::new(5_000, 10, 42).unwrap();
        assert!(plan.fold_sizes().iter().all(|&s| s == 500));
        let plan = FoldPlan::new(17, 4, 1).unwrap();
        let sizes = plan.fold_sizes();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        assert_eq!(FoldPlan::new(17, 4, 1).unwrap(), plan);
    }

    #[test]
    fn fold_plan_errors() {
        assert!(matches!(FoldPlan::new(10, 1, 0), Err(EvaluationError::FoldCount(1))));
        assert!(matches!(FoldPlan::new(3, 5, 0), Err(EvaluationError::TooFewItems { .. })));
    }

    #[test]
    fn grouped_plan_keeps_groups() {
        let groups: Vec<u64> = (0..40).map(|i| i / 4).collect();
        let plan = FoldPlan::grouped(&groups, 5, 3).unwrap();
        for g in 0..10 {
            let folds: Vec<usize> = (0..40).filter(|i| groups[*i] == g).map(|i| plan.assignments[i]).collect();
            assert!(folds.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn memorisation_cv() {
        let pairs = vec![TrainingPair::single("b", "ب").unwrap(); 2];
        let report = kfold_cv::<f64>(&pairs, 2, 0, TransducerConfig::default(), &Resources::bundled()).unwrap();
        assert_eq!(report.mean_accuracy, 1.0);
        assert!(report.to_text().contains("mean accuracy 1.0000"));
    }

    #[test]
    fn tail_block() {
        let records = stream(3);
        let block = make_block(&records, 0, 5_000, 1).unwrap();
        assert_eq!(block.records.len(), 3);
        assert!(matches!(make_block(&records, 3, 5, 2), Err(EvaluationError::Exhausted)));
        assert!(matches!(make_block(&records, 0, 0, 2), Err(EvaluationError::BlockSize)));
    }

    #[test]
    fn blocks_do_not_split_ranges() {
        let mut records = stream(4);
        records[1].w = TokenIndex::Range(2, 3);
        records[2].w = TokenIndex::Single(2);
        records[3].w = TokenIndex::Single(3);
        let block = make_block(&records, 0, 2, 1).unwrap();
        assert_eq!(block.records.len(), 4);
    }

    #[test]
    fn status_is_enforced() {
        let records = stream(2);
        let block = make_block(&records, 0, 2, 1).unwrap();
        let err = block.ingest_corrections(&BTreeMap::new()).unwrap_err();
        assert!(matches!(err, EvaluationError::WrongStatus { expected: BlockStatus::Auto, .. }));
    }
}
