use std::collections::{BTreeMap, HashMap};

use crate::scalar::Scalar;

const BOS: u32 = 0;
const EOS: u32 = 1;
const UNK: u32 = 2;
const FIRST_WORD: u32 = 3;

/// Morpheme n-gram model with add-k smoothing.
///
/// `P(w | h) = (c(h, w) + k) / (c(h) + k·V)` where `V` counts the known
/// morphemes plus the end marker and one unknown-morpheme class, so every
/// probability is strictly positive and each conditional sums to one.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLm<F: Scalar> {
    order: usize,
    add_k: F,
    ids: HashMap<String, u32>,
    words: Vec<String>,
    ngrams: HashMap<Vec<u32>, u64>,
    contexts: HashMap<Vec<u32>, u64>,
}

impl<F: Scalar> NgramLm<F> {
    pub fn new(order: usize, add_k: F) -> Self {
        Self {
            order: order.max(1),
            add_k,
            ids: HashMap::new(),
            words: Vec::new(),
            ngrams: HashMap::new(),
            contexts: HashMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn vocabulary_size(&self) -> usize {
        self.words.len()
    }

    fn intern(&mut self, word: &str) -> u32 {
        if let Some(&id) = self.ids.get(word) {
            return id;
        }
        let id = FIRST_WORD + self.words.len() as u32;
        self.ids.insert(word.to_string(), id);
        self.words.push(word.to_string());
        id
    }

    fn lookup(&self, word: &str) -> u32 {
        self.ids.get(word).copied().unwrap_or(UNK)
    }

    fn padded(&self, ids: impl Iterator<Item = u32>) -> Vec<u32> {
        let mut seq = vec![BOS; self.order - 1];
        seq.extend(ids);
        seq.push(EOS);
        seq
    }

    pub fn observe(&mut self, morphemes: &[String]) {
        let ids: Vec<u32> = morphemes.iter().map(|m| self.intern(m)).collect();
        let seq = self.padded(ids.into_iter());
        let h = self.order - 1;
        for i in h..seq.len() {
            *self.ngrams.entry(seq[i - h..=i].to_vec()).or_default() += 1;
            *self.contexts.entry(seq[i - h..i].to_vec()).or_default() += 1;
        }
    }

    fn types(&self) -> F {
        F::from_count(self.words.len() as u64 + 2)
    }

    fn term(&self, gram: &[u32]) -> F {
        let h = gram.len() - 1;
        let joint = if gram[h] == UNK || gram.contains(&UNK) { 0 } else { self.ngrams.get(gram).copied().unwrap_or(0) };
        let context = if gram[..h].contains(&UNK) { 0 } else { self.contexts.get(&gram[..h]).copied().unwrap_or(0) };
        ((F::from_count(joint) + self.add_k) / (F::from_count(context) + self.add_k * self.types())).ln()
    }

    /// Natural-log probability of a morpheme sequence, end marker included.
    pub fn log_prob(&self, morphemes: &[String]) -> F {
        let ids: Vec<u32> = morphemes.iter().map(|m| self.lookup(m)).collect();
        let seq = self.padded(ids.into_iter());
        let h = self.order - 1;
        (h..seq.len()).fold(F::zero(), |acc, i| acc + self.term(&seq[i - h..=i]))
    }

    /// Log-probability of `before + [slot] + after`, where `None` stands for
    /// a morpheme outside the vocabulary.
    pub fn log_prob_slot(&self, before: &[String], slot: Option<&str>, after: &[String]) -> F {
        let ids = before
            .iter()
            .map(|m| self.lookup(m))
            .chain(std::iter::once(slot.map_or(UNK, |w| self.lookup(w))))
            .chain(after.iter().map(|m| self.lookup(m)));
        let seq = self.padded(ids);
        let h = self.order - 1;
        (h..seq.len()).fold(F::zero(), |acc, i| acc + self.term(&seq[i - h..=i]))
    }

    /// Conditional probability of `next` (or the end marker when `None`)
    /// after `history`, for checks and reporting.
    pub fn prob(&self, history: &[String], next: Option<&str>) -> F {
        let mut gram: Vec<u32> = vec![BOS; self.order - 1];
        gram.extend(history.iter().map(|m| self.lookup(m)));
        let tail = gram.len() - (self.order - 1);
        let mut gram = gram[tail..].to_vec();
        gram.push(next.map_or(EOS, |w| self.lookup(w)));
        self.term(&gram).exp()
    }

    /// All observed n-gram counts as strings, sorted. `<s>`/`</s>` mark the
    /// sequence edges.
    pub fn export_counts(&self) -> Vec<(Vec<String>, u64)> {
        let name = |id: u32| match id {
            BOS => "\u{2}s".to_string(),
            EOS => "\u{3}s".to_string(),
            id => self.words[(id - FIRST_WORD) as usize].clone(),
        };
        let mut out: Vec<(Vec<String>, u64)> =
            self.ngrams.iter().map(|(g, &n)| (g.iter().map(|&id| name(id)).collect(), n)).collect();
        out.sort();
        out
    }

    /// Rebuilds a model from exported counts and its vocabulary in interning order.
    pub fn import_counts(order: usize, add_k: F, vocabulary: &[String], counts: &[(Vec<String>, u64)]) -> Result<Self, String> {
        let mut lm = Self::new(order, add_k);
        for w in vocabulary {
            lm.intern(w);
        }
        let id_of = |lm: &Self, s: &str| -> Result<u32, String> {
            match s {
                "\u{2}s" => Ok(BOS),
                "\u{3}s" => Ok(EOS),
                w => lm.ids.get(w).copied().ok_or_else(|| format!("n-gram word {w:?} not in vocabulary")),
            }
        };
        let mut contexts: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for (gram, n) in counts {
            if gram.len() != lm.order {
                return Err(format!("n-gram of length {} in an order-{} model", gram.len(), lm.order));
            }
            let ids = gram.iter().map(|s| id_of(&lm, s)).collect::<Result<Vec<_>, _>>()?;
            *contexts.entry(ids[..ids.len() - 1].to_vec()).or_default() += n;
            lm.ngrams.insert(ids, *n);
        }
        lm.contexts = contexts.into_iter().collect();
        Ok(lm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn conditionals_sum_to_one() {
        let mut lm = NgramLm::<f64>::new(2, 0.1);
        lm.observe(&s(&["الـ", "عيشة"]));
        lm.observe(&s(&["كيفاش"]));
        lm.observe(&s(&["الـ", "غربة"]));
        for history in [s(&[]), s(&["الـ"]), s(&["مجهول"])] {
            let mut total: f64 = lm.vocabulary().map(|w| lm.prob(&history, Some(w))).sum();
            total += lm.prob(&history, None);
            total += lm.prob(&history, Some("مجهول"));
            assert!((total - 1.0).abs() < 1e-9, "{history:?}: {total}");
        }
    }

    #[test]
    fn seen_beats_unseen() {
        let mut lm = NgramLm::<f64>::new(2, 0.1);
        lm.observe(&s(&["كيفاش"]));
        assert!(lm.log_prob(&s(&["كيفاش"])) > lm.log_prob(&s(&["كيفش"])));
        assert!(lm.log_prob(&s(&["كيفش"])).is_finite());
    }

    #[test]
    fn counts_round_trip() {
        let mut lm = NgramLm::<f64>::new(3, 0.1);
        lm.observe(&s(&["ما+ش", "نجمنا"]));
        lm.observe(&s(&["الـ", "عيشة"]));
        let vocab: Vec<String> = lm.vocabulary().map(String::from).collect();
        let back = NgramLm::import_counts(3, 0.1, &vocab, &lm.export_counts()).unwrap();
        assert_eq!(back, lm);
    }

    #[test]
    fn unigram_order() {
        let mut lm = NgramLm::<f32>::new(1, 0.5);
        lm.observe(&s(&["a"]));
        assert!(lm.log_prob(&s(&["a"])) < 0.0);
    }
}
