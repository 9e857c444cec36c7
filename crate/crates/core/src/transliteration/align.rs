use std::collections::BTreeSet;

use crate::code_system::{segment_graphemes, unit_candidates, GraphemeUnit, MappingTable};
use crate::segmentation::{segment, CliticInventory, MorphemeFrame};

use super::TrainingPair;

/// Monotone alignment of one training pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// Fixed morphemes around the stem (empty for the whole-token fallback).
    pub frame_before: Vec<String>,
    pub frame_after: Vec<String>,
    /// Stem grapheme units and the Arabic stem they were aligned to.
    pub units: Vec<GraphemeUnit>,
    pub target: String,
    /// `(unit, arabic)` emissions, matches and substitutions alike.
    pub emissions: Vec<(String, String)>,
    /// Number of edits (substitutions, deletions, insertions).
    pub cost: usize,
    /// No clitic segmentation reproduced the gold morpheme frame, so the whole
    /// token was aligned against the fused transcription.
    pub structural_fallback: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Step {
    Match,
    Substitute,
    Delete,
    Insert,
}

struct Cell {
    cost: usize,
    back: Option<(Step, usize, usize, usize)>,
}

/// Aligns a training pair: the gold frame must equal the fixed clitic
/// morphemes of some segmentation; its stem is then aligned to the stem units
/// by dynamic programming that minimises edits, ties going to the first
/// segmentation, tiling and step considered.
pub fn align_pair(table: &MappingTable, clitics: &CliticInventory, pair: &TrainingPair, loanword: bool) -> Alignment {
    let token = pair.arabish.to_lowercase();
    let gold = &pair.arabic_morphemes;
    let mut best: Option<Alignment> = None;
    for seg in segment(&token, clitics) {
        let MorphemeFrame { before, stem, after } = seg.frame();
        if gold.len() < before.len() + after.len() {
            continue;
        }
        if gold[..before.len()] != before[..] || gold[gold.len() - after.len()..] != after[..] {
            continue;
        }
        let middle = &gold[before.len()..gold.len() - after.len()];
        match (stem, middle) {
            (None, []) => {
                let candidate = Alignment {
                    frame_before: before,
                    frame_after: after,
                    units: Vec::new(),
                    target: String::new(),
                    emissions: Vec::new(),
                    cost: 0,
                    structural_fallback: false,
                };
                keep_better(&mut best, candidate);
            }
            (Some(stem), [target]) => {
                for tiling in segment_graphemes(table, &stem) {
                    let (cost, emissions) = align_units(table, &tiling.units, target, loanword);
                    let candidate = Alignment {
                        frame_before: before.clone(),
                        frame_after: after.clone(),
                        units: tiling.units,
                        target: target.clone(),
                        emissions,
                        cost,
                        structural_fallback: false,
                    };
                    keep_better(&mut best, candidate);
                }
            }
            _ => {}
        }
    }
    if let Some(found) = best {
        return found;
    }
    let target: String = gold.concat().chars().filter(|c| !matches!(c, 'ـ' | '+' | ' ')).collect();
    let mut fallback: Option<Alignment> = None;
    for tiling in segment_graphemes(table, &token) {
        let (cost, emissions) = align_units(table, &tiling.units, &target, loanword);
        let candidate = Alignment {
            frame_before: Vec::new(),
            frame_after: Vec::new(),
            units: tiling.units,
            target: target.clone(),
            emissions,
            cost,
            structural_fallback: true,
        };
        keep_better(&mut fallback, candidate);
    }
    fallback.unwrap_or(Alignment {
        frame_before: Vec::new(),
        frame_after: Vec::new(),
        units: Vec::new(),
        target,
        emissions: Vec::new(),
        cost: usize::MAX,
        structural_fallback: true,
    })
}

fn keep_better(best: &mut Option<Alignment>, candidate: Alignment) {
    if best.as_ref().is_none_or(|b| candidate.cost < b.cost) {
        *best = Some(candidate);
    }
}

/// Edit-distance alignment of units against target characters. Returns the
/// cost and the emissions along the cheapest path.
fn align_units(table: &MappingTable, units: &[GraphemeUnit], target: &str, loanword: bool) -> (usize, Vec<(String, String)>) {
    let chars: Vec<char> = target.chars().collect();
    let m = units.len();
    let n = chars.len();
    let last = m.saturating_sub(1);
    let options: Vec<BTreeSet<String>> =
        units.iter().enumerate().map(|(i, u)| unit_candidates(table, u, loanword, i == last)).collect();

    let mut grid: Vec<Vec<Cell>> =
        (0..=m).map(|_| (0..=n).map(|_| Cell { cost: usize::MAX, back: None }).collect()).collect();
    grid[0][0].cost = 0;
    for i in 0..=m {
        for j in 0..=n {
            let here = grid[i][j].cost;
            if here == usize::MAX {
                continue;
            }
            let relax = |grid: &mut Vec<Vec<Cell>>, ni: usize, nj: usize, cost: usize, step: Step, width: usize| {
                // on ties prefer the path that placed its units earlier
                let earlier = matches!(grid[ni][nj].back, Some((_, pi, _, _)) if cost == grid[ni][nj].cost && i > pi);
                if cost < grid[ni][nj].cost || earlier {
                    grid[ni][nj] = Cell { cost, back: Some((step, i, j, width)) };
                }
            };
            if i < m {
                for c in &options[i] {
                    let len = c.chars().count();
                    if j + len <= n && chars[j..j + len].iter().copied().eq(c.chars()) {
                        relax(&mut grid, i + 1, j + len, here, Step::Match, len);
                    }
                }
                if j < n {
                    relax(&mut grid, i + 1, j + 1, here + 1, Step::Substitute, 1);
                }
                relax(&mut grid, i + 1, j, here + 1, Step::Delete, 0);
            }
            if j < n {
                relax(&mut grid, i, j + 1, here + 1, Step::Insert, 1);
            }
        }
    }

    let mut emissions = Vec::new();
    let (mut i, mut j) = (m, n);
    while let Some((step, pi, pj, width)) = grid[i][j].back {
        if matches!(step, Step::Match | Step::Substitute) {
            emissions.push((units[pi].text.clone(), chars[pj..pj + width].iter().collect()));
        }
        i = pi;
        j = pj;
    }
    emissions.reverse();
    (grid[m][n].cost, emissions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn align(token: &str, gold: &[&str]) -> Alignment {
        let pair = TrainingPair::new(token, gold.iter().map(|s| s.to_string()).collect()).unwrap();
        align_pair(&MappingTable::default(), &CliticInventory::default(), &pair, false)
    }

    fn emitted(a: &Alignment) -> Vec<(&str, &str)> {
        a.emissions.iter().map(|(u, x)| (u.as_str(), x.as_str())).collect()
    }

    #[test]
    fn exact_alignment() {
        let a = align("kifech", &["كيفاش"]);
        assert_eq!(a.cost, 0);
        assert_eq!(emitted(&a), vec![("k", "ك"), ("i", "ي"), ("f", "ف"), ("e", "ا"), ("ch", "ش")]);
    }

    #[test]
    fn clitic_frame_is_used() {
        let a = align("l3icha", &["الـ", "عيشة"]);
        assert!(!a.structural_fallback);
        assert_eq!(a.frame_before, vec!["الـ".to_string()]);
        assert_eq!(a.cost, 0);
    }

    #[test]
    fn negation_frame() {
        let a = align("manajemnech", &["ما+ش", "نجمنا"]);
        assert!(!a.structural_fallback);
        assert_eq!(a.target, "نجمنا");
        assert_eq!(a.cost, 0);
    }

    #[test]
    fn clitic_only_frame() {
        let a = align("fil", &["فـ", "الـ"]);
        assert!(a.units.is_empty());
        assert_eq!(a.cost, 0);
    }

    #[test]
    fn substitution_is_recorded() {
        let a = align("x", &["كس"]);
        assert_eq!(a.cost, 2);
        assert_eq!(emitted(&a), vec![("x", "ك")]);
    }

    #[test]
    fn unmatched_frame_falls_back() {
        let a = align("kifech", &["كيف", "اش"]);
        assert!(a.structural_fallback);
        assert_eq!(a.target, "كيفاش");
    }
}
