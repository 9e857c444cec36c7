use std::collections::{BTreeMap, BTreeSet};

use crate::code_system::{is_passthrough, unit_candidates, GraphemeUnit, MappingTable};
use crate::scalar::Scalar;

/// Smoothed `P(arabic | grapheme unit)` estimated from aligned counts.
///
/// A unit's row covers every grapheme the mapping table lists for it (in any
/// context) plus every emission seen in training, so rows always sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel<F: Scalar> {
    counts: BTreeMap<String, BTreeMap<String, u64>>,
    add_k: F,
}

impl<F: Scalar> Channel<F> {
    pub fn new(add_k: F) -> Self {
        Self { counts: BTreeMap::new(), add_k }
    }

    pub fn from_counts(counts: BTreeMap<String, BTreeMap<String, u64>>, add_k: F) -> Self {
        Self { counts, add_k }
    }

    pub fn observe(&mut self, unit: &str, arabic: &str) {
        *self.counts.entry(unit.to_string()).or_default().entry(arabic.to_string()).or_default() += 1;
    }

    pub fn counts(&self) -> &BTreeMap<String, BTreeMap<String, u64>> {
        &self.counts
    }

    /// Emissions learned for a unit from data.
    pub fn learned(&self, unit: &str) -> impl Iterator<Item = &str> {
        self.counts.get(unit).into_iter().flat_map(|row| row.keys().map(String::as_str))
    }

    fn support(&self, table: &MappingTable, unit: &GraphemeUnit) -> BTreeSet<String> {
        let mut support = if is_passthrough(table, unit, true, true) {
            BTreeSet::new()
        } else {
            unit_candidates(table, unit, true, true)
        };
        support.extend(self.learned(&unit.text).map(str::to_string));
        support
    }

    /// Full probability row of a unit. Empty when the unit has no known
    /// realisation at all.
    pub fn row(&self, table: &MappingTable, unit: &GraphemeUnit) -> BTreeMap<String, F> {
        let support = self.support(table, unit);
        if support.is_empty() {
            return BTreeMap::new();
        }
        let observed = self.counts.get(&unit.text);
        let count = |a: &str| observed.and_then(|row| row.get(a)).copied().unwrap_or(0);
        let total: u64 = support.iter().map(|a| count(a)).sum();
        let denominator = F::from_count(total) + self.add_k * F::from_count(support.len() as u64);
        support
            .into_iter()
            .map(|a| {
                let p = (F::from_count(count(&a)) + self.add_k) / denominator;
                (a, p)
            })
            .collect()
    }

    /// Maximum-likelihood `P(unit | arabic)` from the raw counts, keyed by
    /// Arabic emission then unit.
    pub fn emission_weights(&self) -> BTreeMap<String, BTreeMap<String, F>> {
        let mut by_arabic: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
        for (unit, row) in &self.counts {
            for (arabic, &n) in row {
                *by_arabic.entry(arabic.clone()).or_default().entry(unit.clone()).or_default() += n;
            }
        }
        by_arabic
            .into_iter()
            .map(|(arabic, units)| {
                let total = F::from_count(units.values().sum());
                let row = units.into_iter().map(|(u, n)| (u, F::from_count(n) / total)).collect();
                (arabic, row)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code_system::{segment_graphemes, UnitKind};

    fn unit(text: &str) -> GraphemeUnit {
        let table = MappingTable::default();
        segment_graphemes(&table, text).into_iter().find(|s| s.units.len() == 1).unwrap().units[0].clone()
    }

    #[test]
    fn rows_sum_to_one() {
        let table = MappingTable::default();
        let mut ch = Channel::<f64>::new(0.1);
        ch.observe("h", "ح");
        ch.observe("h", "ح");
        ch.observe("h", "ه");
        ch.observe("x", "كس");
        for u in ["h", "a", "ch", "7", "x", "nn", "o"] {
            let row = ch.row(&table, &unit(u));
            let total: f64 = row.values().sum();
            assert!((total - 1.0).abs() < 1e-9, "{u}: {total}");
        }
    }

    #[test]
    fn unknown_unit_has_empty_row() {
        let table = MappingTable::default();
        let ch = Channel::<f64>::new(0.1);
        let u = unit("x");
        assert_eq!(u.kind, UnitKind::Unmapped);
        assert!(ch.row(&table, &u).is_empty());
    }

    #[test]
    fn emissions_normalise_per_grapheme() {
        let mut ch = Channel::<f64>::new(0.1);
        ch.observe("7", "ح");
        ch.observe("h", "ح");
        ch.observe("7", "ح");
        let w = ch.emission_weights();
        assert!((w["ح"]["7"] - 2.0 / 3.0).abs() < 1e-12);
    }
}
