use crate::code_system::{segment_graphemes, unit_candidates, GraphemeUnit};
use crate::scalar::Scalar;
use crate::segmentation::{segment, MorphemeFrame};

use super::channel::Channel;
use super::Resources;

/// One way of reading a token: fixed clitic morphemes around a stem tiled into
/// grapheme units, each unit carrying its scored Arabic options.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch<F: Scalar> {
    pub before: Vec<String>,
    pub after: Vec<String>,
    /// `None` for a token made of clitics only.
    pub stem_units: Option<Vec<GraphemeUnit>>,
    /// Per stem unit: `(arabic, channel log-probability)`, sorted by arabic.
    pub options: Vec<Vec<(String, F)>>,
}

impl<F: Scalar> Branch<F> {
    /// Morpheme sequence for a given stem string.
    pub fn morphemes(&self, stem: Option<&str>) -> Vec<String> {
        let mut out = self.before.clone();
        out.extend(stem.map(str::to_string));
        out.extend(self.after.iter().cloned());
        out
    }

    pub fn path_count(&self) -> u128 {
        self.options.iter().fold(1u128, |acc, o| acc.saturating_mul(o.len() as u128))
    }
}

/// Everything a token may be transcribed as: segmentations times grapheme
/// lattices.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSpace<F: Scalar> {
    pub token: String,
    pub branches: Vec<Branch<F>>,
}

impl<F: Scalar> CandidateSpace<F> {
    pub fn build(resources: &Resources, channel: &Channel<F>, unknown_penalty: F, token: &str, loanword: bool) -> Self {
        let table = &resources.table;
        let mut branches = Vec::new();
        for seg in segment(token, &resources.clitics) {
            let MorphemeFrame { before, stem, after } = seg.frame();
            let Some(stem) = stem else {
                branches.push(Branch { before, after, stem_units: None, options: Vec::new() });
                continue;
            };
            for tiling in segment_graphemes(table, &stem) {
                let last = tiling.units.len() - 1;
                let options = tiling
                    .units
                    .iter()
                    .enumerate()
                    .map(|(i, unit)| {
                        let row = channel.row(table, unit);
                        let allowed = unit_candidates(table, unit, loanword, i == last);
                        let anywhere = unit_candidates(table, unit, true, true);
                        let mut options: Vec<(String, F)> = allowed
                            .iter()
                            .cloned()
                            .chain(channel.learned(&unit.text).filter(|a| !anywhere.contains(*a)).map(str::to_string))
                            .map(|a| {
                                let score = row.get(&a).map_or(unknown_penalty, |p| p.ln());
                                (a, score)
                            })
                            .collect();
                        options.sort_by(|x, y| x.0.cmp(&y.0));
                        options.dedup_by(|x, y| x.0 == y.0);
                        options
                    })
                    .collect();
                branches.push(Branch { before: before.clone(), after: after.clone(), stem_units: Some(tiling.units), options });
            }
        }
        Self { token: token.to_string(), branches }
    }

    pub fn path_count(&self) -> u128 {
        self.branches.iter().fold(0u128, |acc, b| acc.saturating_add(b.path_count()))
    }

    /// Whether some path yields exactly this morpheme sequence.
    pub fn contains(&self, morphemes: &[String]) -> bool {
        self.branches.iter().any(|b| {
            let (nb, na) = (b.before.len(), b.after.len());
            if morphemes.len() < nb + na || morphemes[..nb] != b.before[..] || morphemes[morphemes.len() - na..] != b.after[..] {
                return false;
            }
            let middle = &morphemes[nb..morphemes.len() - na];
            match (&b.stem_units, middle) {
                (None, []) => true,
                (Some(_), [stem]) => spells(&b.options, stem),
                _ => false,
            }
        })
    }
}

fn spells<F>(options: &[Vec<(String, F)>], target: &str) -> bool {
    let mut reachable = vec![0usize];
    for unit in options {
        let mut next: Vec<usize> = reachable
            .iter()
            .flat_map(|&at| unit.iter().filter(move |(a, _)| target[at..].starts_with(a.as_str())).map(move |(a, _)| at + a.len()))
            .collect();
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            return false;
        }
        reachable = next;
    }
    reachable.contains(&target.len())
}
