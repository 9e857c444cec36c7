use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::code_system::GraphemeUnit;
use crate::normalization::{detect_code_switch, latin_key, normalize, NormFlag};
use crate::scalar::Scalar;

use super::align::align_pair;
use super::candidates::{Branch, CandidateSpace};
use super::channel::Channel;
use super::lm::NgramLm;
use super::search::{k_best, PrefixBound, SearchParams};
use super::{Prediction, PredictionSource, Resources, TrainingPair, TransducerConfig, TransliterationError};

/// Identifier written at the top of every serialized model.
pub const MODEL_FORMAT: &str = "tarc-transducer";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingStats {
    pub pairs: usize,
    pub code_switch_skipped: usize,
    /// Pairs whose gold morphemes did not fit any clitic segmentation.
    pub oov_structure: usize,
    /// Total edit cost of all alignments.
    pub alignment_edits: usize,
    pub lexicon_size: usize,
    pub lm_vocabulary: usize,
}

type FrameKey = (Vec<String>, Vec<String>);

/// Trained transducer. Immutable after training and safe to share between
/// threads; the only interior state is a cache of search bounds.
#[derive(Debug)]
pub struct TransducerModel<F: Scalar> {
    config: TransducerConfig<F>,
    resources: Resources,
    channel: Channel<F>,
    lm: NgramLm<F>,
    lexicon: BTreeMap<String, BTreeMap<Vec<String>, u64>>,
    stats: TrainingStats,
    bounds: RwLock<HashMap<FrameKey, Arc<PrefixBound<F>>>>,
}

impl<F: Scalar> Clone for TransducerModel<F> {
    fn clone(&self) -> Self {
        Self {
            config: self.config,
            resources: self.resources.clone(),
            channel: self.channel.clone(),
            lm: self.lm.clone(),
            lexicon: self.lexicon.clone(),
            stats: self.stats.clone(),
            bounds: RwLock::default(),
        }
    }
}

impl<F: Scalar> PartialEq for TransducerModel<F> {
    fn eq(&self, other: &Self) -> bool {
        self.config == other.config
            && self.resources == other.resources
            && self.channel == other.channel
            && self.lm == other.lm
            && self.lexicon == other.lexicon
            && self.stats == other.stats
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "F: Scalar")]
struct ModelFile<F: Scalar> {
    format: String,
    version: u32,
    config: TransducerConfig<F>,
    resources: Resources,
    channel: BTreeMap<String, BTreeMap<String, u64>>,
    lm_vocabulary: Vec<String>,
    lm_ngrams: Vec<(Vec<String>, u64)>,
    lexicon: Vec<(String, Vec<(Vec<String>, u64)>)>,
    stats: TrainingStats,
}

impl<F: Scalar> TransducerModel<F> {
    /// Trains on the given pairs. Pairs are sorted first, so the result does
    /// not depend on their order.
    pub fn train(
        pairs: &[TrainingPair],
        config: TransducerConfig<F>,
        resources: Resources,
    ) -> Result<Self, TransliterationError> {
        config.validate()?;
        let mut sorted: Vec<TrainingPair> = Vec::with_capacity(pairs.len());
        let mut skipped = 0;
        for pair in pairs {
            if detect_code_switch(&pair.arabish, &resources.lexicon) {
                skipped += 1;
                continue;
            }
            let key = latin_key(&pair.arabish);
            if key.is_empty() {
                return Err(TransliterationError::InvalidPair("empty arabish".into()));
            }
            sorted.push(TrainingPair::new(&key, pair.arabic_morphemes.clone())?);
        }
        if sorted.is_empty() {
            return Err(TransliterationError::EmptyTrainingSet);
        }
        sorted.sort();

        let mut channel = Channel::new(config.add_k);
        let mut lm = NgramLm::new(config.order, config.add_k);
        let mut lexicon: BTreeMap<String, BTreeMap<Vec<String>, u64>> = BTreeMap::new();
        let mut stats = TrainingStats { pairs: sorted.len(), code_switch_skipped: skipped, ..Default::default() };
        for pair in &sorted {
            let loanword = resources.lexicon.is_loanword(&pair.arabish);
            let alignment = align_pair(&resources.table, &resources.clitics, pair, loanword);
            if alignment.structural_fallback {
                stats.oov_structure += 1;
            }
            stats.alignment_edits = stats.alignment_edits.saturating_add(alignment.cost);
            for (unit, arabic) in &alignment.emissions {
                channel.observe(unit, arabic);
            }
            lm.observe(&pair.arabic_morphemes);
            *lexicon.entry(pair.arabish.clone()).or_default().entry(pair.arabic_morphemes.clone()).or_default() += 1;
        }
        stats.lexicon_size = lexicon.len();
        stats.lm_vocabulary = lm.vocabulary_size();
        log::debug!("trained on {} pairs ({} structural fallbacks)", stats.pairs, stats.oov_structure);
        Ok(Self { config, resources, channel, lm, lexicon, stats, bounds: RwLock::default() })
    }

    pub fn config(&self) -> &TransducerConfig<F> {
        &self.config
    }

    pub fn resources(&self) -> &Resources {
        &self.resources
    }

    pub fn stats(&self) -> &TrainingStats {
        &self.stats
    }

    pub fn channel(&self) -> &Channel<F> {
        &self.channel
    }

    pub fn lm(&self) -> &NgramLm<F> {
        &self.lm
    }

    /// Gold sequences seen for a normalized form, with their frequencies.
    pub fn lexicon_entry(&self, key: &str) -> Option<&BTreeMap<Vec<String>, u64>> {
        self.lexicon.get(key)
    }

    pub fn lexicon_keys(&self) -> impl Iterator<Item = &str> {
        self.lexicon.keys().map(String::as_str)
    }

    /// Smoothed `P(arabic | unit)` row.
    pub fn channel_row(&self, unit: &GraphemeUnit) -> BTreeMap<String, F> {
        self.channel.row(&self.resources.table, unit)
    }

    /// Maximum-likelihood `P(unit | arabic)` from the aligned counts.
    pub fn emission_weights(&self) -> BTreeMap<String, BTreeMap<String, F>> {
        self.channel.emission_weights()
    }

    /// Candidate space of an already normalized token.
    pub fn candidate_space(&self, token: &str, loanword: bool) -> CandidateSpace<F> {
        CandidateSpace::build(&self.resources, &self.channel, self.config.unknown_penalty, token, loanword)
    }

    /// Exact score of one morpheme sequence reached with the given channel
    /// log-probability.
    pub fn score(&self, channel: F, morphemes: &[String]) -> F {
        super::search::combine(self.config.lattice_weight, channel, self.lm.log_prob(morphemes))
    }

    fn frame_bound(&self, branch: &Branch<F>) -> Arc<PrefixBound<F>> {
        let key = (branch.before.clone(), branch.after.clone());
        if let Some(found) = self.bounds.read().expect("bound cache poisoned").get(&key) {
            return Arc::clone(found);
        }
        let built = Arc::new(PrefixBound::build(&self.lm, &branch.before, &branch.after));
        let mut cache = self.bounds.write().expect("bound cache poisoned");
        Arc::clone(cache.entry(key).or_insert(built))
    }

    /// Ranked candidates for an already normalized token, bypassing the
    /// lexicon. At most `beam_width` distinct morpheme sequences.
    pub fn decode(&self, token: &str, loanword: bool) -> Vec<(Vec<String>, F)> {
        let space = self.candidate_space(token, loanword);
        let params = SearchParams {
            lambda: self.config.lattice_weight,
            k: self.config.beam_width,
            max_expansions: self.config.max_expansions,
        };
        k_best(&space, &self.lm, |b| self.frame_bound(b), &params)
    }

    /// Transcribes one token: lexicon shortcut for seen forms, code-switched
    /// words kept as written, search otherwise.
    pub fn predict(&self, token: &str, loanword: bool) -> Result<Prediction<F>, TransliterationError> {
        if token.trim().is_empty() {
            return Err(TransliterationError::EmptyToken);
        }
        let report = normalize(token, &self.resources.lexicon);
        let key = report.normalized;
        if let Some(golds) = self.lexicon.get(&key) {
            let total = F::from_count(golds.values().sum());
            let mut ranked: Vec<(&Vec<String>, u64)> = golds.iter().map(|(g, &n)| (g, n)).collect();
            ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
            let mut scored = ranked.into_iter().map(|(g, n)| (g.clone(), (F::from_count(n) / total).ln()));
            let (morphemes, score) = scored.next().expect("lexicon entries are non-empty");
            let alternatives = scored.take(self.config.beam_width - 1).collect();
            return Ok(Prediction { morphemes, score, alternatives, source: PredictionSource::Lexicon });
        }
        if report.flags.contains(&NormFlag::CodeSwitch) {
            return Ok(Prediction {
                morphemes: vec![key],
                score: F::zero(),
                alternatives: Vec::new(),
                source: PredictionSource::CodeSwitch,
            });
        }
        let loanword = loanword || report.flags.contains(&NormFlag::Loanword);
        let mut ranked = self.decode(&key, loanword).into_iter();
        let Some((morphemes, score)) = ranked.next() else {
            return Ok(Prediction {
                morphemes: vec![key],
                score: self.config.unknown_penalty,
                alternatives: Vec::new(),
                source: PredictionSource::Search,
            });
        };
        Ok(Prediction { morphemes, score, alternatives: ranked.collect(), source: PredictionSource::Search })
    }

    pub fn to_json(&self) -> Result<String, TransliterationError> {
        let file = ModelFile {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            config: self.config,
            resources: self.resources.clone(),
            channel: self.channel.counts().clone(),
            lm_vocabulary: self.lm.vocabulary().map(str::to_string).collect(),
            lm_ngrams: self.lm.export_counts(),
            lexicon: self
                .lexicon
                .iter()
                .map(|(k, golds)| (k.clone(), golds.iter().map(|(g, &n)| (g.clone(), n)).collect()))
                .collect(),
            stats: self.stats.clone(),
        };
        serde_json::to_string_pretty(&file).map_err(|e| TransliterationError::ModelFormat(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self, TransliterationError> {
        let file: ModelFile<F> =
            serde_json::from_str(text).map_err(|e| TransliterationError::ModelFormat(e.to_string()))?;
        if file.format != MODEL_FORMAT {
            return Err(TransliterationError::ModelFormat(format!("unexpected format {:?}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(TransliterationError::ModelFormat(format!("unsupported version {}", file.version)));
        }
        file.config.validate()?;
        let lm = NgramLm::import_counts(file.config.order, file.config.add_k, &file.lm_vocabulary, &file.lm_ngrams)
            .map_err(TransliterationError::ModelFormat)?;
        let lexicon = file.lexicon.into_iter().map(|(k, golds)| (k, golds.into_iter().collect())).collect();
        Ok(Self {
            config: file.config,
            resources: file.resources,
            channel: Channel::from_counts(file.channel, file.config.add_k),
            lm,
            lexicon,
            stats: file.stats,
            bounds: RwLock::default(),
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), TransliterationError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, TransliterationError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_system::UnitKind;

    fn pair(a: &str, m: &[&str]) -> TrainingPair {
        TrainingPair::new(a, m.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn train(pairs: &[TrainingPair]) -> TransducerModel<f64> {
        TransducerModel::train(pairs, TransducerConfig::default(), Resources::bundled()).unwrap()
    }

    #[test]
    fn single_pair_forces_channel() {
        let model = train(&[pair("b", &["ب"])]);
        let unit = GraphemeUnit { text: "b".into(), kind: UnitKind::Mapped };
        let counts = &model.channel().counts()["b"];
        assert_eq!(counts.len(), 1);
        assert_eq!(model.emission_weights()["ب"]["b"], 1.0);
        let row = model.channel_row(&unit);
        assert_eq!(row.len(), 1);
        assert!((row["ب"] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_training_set() {
        let err = TransducerModel::<f64>::train(&[], TransducerConfig::default(), Resources::bundled());
        assert!(matches!(err, Err(TransliterationError::EmptyTrainingSet)));
        let only_foreign = [pair("recette", &["recette"])];
        let err = TransducerModel::<f64>::train(&only_foreign, TransducerConfig::default(), Resources::bundled());
        assert!(matches!(err, Err(TransliterationError::EmptyTrainingSet)));
    }

    #[test]
    fn lexicon_shortcut_prefers_frequent_gold() {
        let model = train(&[pair("w", &["و"]), pair("w", &["و"]), pair("w", &["وا"])]);
        let p = model.predict("W", false).unwrap();
        assert_eq!(p.morphemes, vec!["و".to_string()]);
        assert_eq!(p.source, PredictionSource::Lexicon);
        assert!(p.alternatives.iter().all(|(_, s)| *s <= p.score));
    }

    #[test]
    fn order_independent() {
        let a = [pair("kifech", &["كيفاش"]), pair("l3icha", &["الـ", "عيشة"]), pair("w", &["و"])];
        let mut b = a.clone();
        b.reverse();
        assert_eq!(train(&a), train(&b));
    }

    #[test]
    fn unseen_token_uses_search() {
        let model = train(&[pair("kifech", &["كيفاش"]), pair("bnin", &["بنين"])]);
        let p = model.predict("kif", false).unwrap();
        assert_eq!(p.source, PredictionSource::Search);
        assert!(p.alternatives.iter().all(|(_, s)| *s <= p.score));
        assert_eq!(model.predict("kif", false).unwrap(), p);
    }

    #[test]
    fn code_switch_passes_through() {
        let model = train(&[pair("w", &["و"])]);
        let p = model.predict("Recette", false).unwrap();
        assert_eq!(p.source, PredictionSource::CodeSwitch);
        assert_eq!(p.morphemes, vec!["recette".to_string()]);
    }

    #[test]
    fn empty_token() {
        let model = train(&[pair("w", &["و"])]);
        assert!(matches!(model.predict("  ", false), Err(TransliterationError::EmptyToken)));
    }

    #[test]
    fn json_round_trip() {
        let model = train(&[pair("kifech", &["كيفاش"]), pair("manajemnech", &["ما+ش", "نجمنا"])]);
        let back = TransducerModel::<f64>::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(back, model);
        assert_eq!(back.decode("kifach", false), model.decode("kifach", false));
        assert!(TransducerModel::<f64>::from_json("{\"format\":\"other\"}").is_err());
    }
}
