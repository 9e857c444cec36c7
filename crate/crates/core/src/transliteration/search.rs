//! Exact k-best search over a candidate space.
//!
//! Best-first expansion of partial stems. A partial state is ranked by an
//! upper bound on any completion: the channel score so far plus the best
//! remaining per-unit scores, and the best language-model score over every
//! vocabulary stem that still extends the partial string (or an unknown
//! stem). Complete states carry their exact score, so once the best open
//! bound falls below the k-th collected score nothing better remains.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::scalar::Scalar;

use super::candidates::{Branch, CandidateSpace};
use super::lm::NgramLm;

/// Upper bounds on the language-model score of one morpheme frame, indexed
/// by stem prefix.
#[derive(Debug)]
pub(crate) struct PrefixBound<F: Scalar> {
    unknown: F,
    by_prefix: HashMap<String, F>,
}

impl<F: Scalar> PrefixBound<F> {
    pub(crate) fn build(lm: &NgramLm<F>, before: &[String], after: &[String]) -> Self {
        let mut by_prefix: HashMap<String, F> = HashMap::new();
        for word in lm.vocabulary() {
            let score = lm.log_prob_slot(before, Some(word), after);
            let cuts = word.char_indices().map(|(i, _)| i).chain(std::iter::once(word.len()));
            for cut in cuts {
                by_prefix
                    .entry(word[..cut].to_string())
                    .and_modify(|s| *s = s.max(score))
                    .or_insert(score);
            }
        }
        Self { unknown: lm.log_prob_slot(before, None, after), by_prefix }
    }

    fn bound(&self, prefix: &str) -> F {
        self.by_prefix.get(prefix).map_or(self.unknown, |&s| s.max(self.unknown))
    }
}

struct Node<F> {
    f: F,
    order: u64,
    branch: usize,
    unit: usize,
    stem: String,
    channel: F,
    exact: bool,
}

impl<F: Scalar> PartialEq for Node<F> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<F: Scalar> Eq for Node<F> {}
impl<F: Scalar> PartialOrd for Node<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<F: Scalar> Ord for Node<F> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.f
            .partial_cmp(&other.f)
            .unwrap_or(Ordering::Equal)
            .then(self.exact.cmp(&other.exact))
            .then(other.order.cmp(&self.order))
    }
}

pub(crate) struct SearchParams<F> {
    pub lambda: F,
    pub k: usize,
    pub max_expansions: usize,
}

/// Exact score of a complete candidate.
pub(crate) fn combine<F: Scalar>(lambda: F, channel: F, lm_score: F) -> F {
    lambda * channel + (F::one() - lambda) * lm_score
}

/// The `k` best distinct morpheme sequences, best first, ties broken by the
/// morpheme strings in ascending order.
pub(crate) fn k_best<F: Scalar, B>(
    space: &CandidateSpace<F>,
    lm: &NgramLm<F>,
    bounds: B,
    params: &SearchParams<F>,
) -> Vec<(Vec<String>, F)>
where
    B: Fn(&Branch<F>) -> std::sync::Arc<PrefixBound<F>>,
{
    let lambda = params.lambda;
    let mut heap = BinaryHeap::new();
    let mut order = 0u64;
    let mut frames = Vec::with_capacity(space.branches.len());
    let mut remaining = Vec::with_capacity(space.branches.len());

    for (b, branch) in space.branches.iter().enumerate() {
        // best channel score achievable from each unit onwards
        let mut suffix = vec![F::zero(); branch.options.len() + 1];
        for i in (0..branch.options.len()).rev() {
            let best = branch.options[i].iter().map(|(_, s)| *s).fold(F::neg_infinity(), F::max);
            suffix[i] = suffix[i + 1] + best;
        }
        remaining.push(suffix);
        if branch.stem_units.is_none() {
            let score = combine(lambda, F::zero(), lm.log_prob(&branch.morphemes(None)));
            heap.push(Node { f: score, order, branch: b, unit: 0, stem: String::new(), channel: F::zero(), exact: true });
            frames.push(None);
        } else {
            let bound = bounds(branch);
            let f = combine(lambda, remaining[b][0], bound.bound(""));
            heap.push(Node { f, order, branch: b, unit: 0, stem: String::new(), channel: F::zero(), exact: false });
            frames.push(Some(bound));
        }
        order += 1;
    }

    let mut best: HashMap<Vec<String>, F> = HashMap::new();
    let mut threshold: Option<F> = None;
    let mut expansions = 0usize;
    while let Some(node) = heap.pop() {
        if let Some(t) = threshold {
            if node.f < t - F::bound_slack(t) {
                break;
            }
        }
        let branch = &space.branches[node.branch];
        if node.exact {
            let stem = branch.stem_units.as_ref().map(|_| node.stem.as_str());
            let morphemes = branch.morphemes(stem);
            let entry = best.entry(morphemes).or_insert(node.f);
            if node.f > *entry {
                *entry = node.f;
            }
            if best.len() >= params.k {
                let mut scores: Vec<F> = best.values().copied().collect();
                scores.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
                threshold = Some(scores[params.k - 1]);
            }
            continue;
        }
        expansions += 1;
        if expansions > params.max_expansions {
            log::warn!("search for {:?} stopped after {} expansions", space.token, params.max_expansions);
            break;
        }
        let bound = frames[node.branch].as_ref().expect("stem branch has a frame bound");
        for (arabic, score) in &branch.options[node.unit] {
            let channel = node.channel + *score;
            let mut stem = node.stem.clone();
            stem.push_str(arabic);
            let unit = node.unit + 1;
            let next = if unit == branch.options.len() {
                if stem.is_empty() {
                    continue;
                }
                let lm_score = lm.log_prob(&branch.morphemes(Some(&stem)));
                Node { f: combine(lambda, channel, lm_score), order, branch: node.branch, unit, stem, channel, exact: true }
            } else {
                let f = combine(lambda, channel + remaining[node.branch][unit], bound.bound(&stem));
                Node { f, order, branch: node.branch, unit, stem, channel, exact: false }
            };
            order += 1;
            heap.push(next);
        }
    }

    let mut ranked: Vec<(Vec<String>, F)> = best.into_iter().collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(params.k);
    ranked
}
