//! Arabish to Arabic grapheme mapping and lattice expansion.
//!
//! A token is tiled into grapheme units (single letters, digraphs such as
//! `ch`, doubled consonants). Every tiling becomes one lattice branch whose
//! positions hold the Arabic candidates of each unit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default mapping table, one entry per line.
pub const DEFAULT_TABLE: &str = include_str!("../data/code_system.tsv");

/// Latin letters that may stand for an unwritten short vowel.
pub const SHORT_VOWELS: [char; 7] = ['a', 'e', 'i', 'o', 'u', 'é', 'è'];

/// Arabic gemination mark.
pub const SHADDA: char = '\u{0651}';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodeSystemError {
    #[error("empty token")]
    EmptyToken,
    #[error("mapping table line {line}: {reason}")]
    TableLine { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MappingEntry {
    pub arabish_variant: String,
    pub arabic_grapheme: String,
    pub ipa: String,
    pub loanword_only: bool,
    /// Offered only for the last unit of a token.
    pub word_final: bool,
}

impl MappingEntry {
    pub fn new(arabish_variant: &str, arabic_grapheme: &str, ipa: &str) -> Self {
        Self {
            arabish_variant: arabish_variant.to_string(),
            arabic_grapheme: arabic_grapheme.to_string(),
            ipa: ipa.to_string(),
            loanword_only: false,
            word_final: false,
        }
    }

    fn flags(&self) -> String {
        let mut flags = Vec::new();
        if self.loanword_only {
            flags.push("loanword");
        }
        if self.word_final {
            flags.push("final");
        }
        if flags.is_empty() {
            "-".to_string()
        } else {
            flags.join(",")
        }
    }
}

/// Many-to-many Arabish/Arabic grapheme table. Immutable once shared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<MappingEntry>", into = "Vec<MappingEntry>")]
pub struct MappingTable {
    entries: Vec<MappingEntry>,
    by_variant: BTreeMap<String, Vec<usize>>,
}

impl From<Vec<MappingEntry>> for MappingTable {
    fn from(entries: Vec<MappingEntry>) -> Self {
        let mut table = MappingTable { entries: Vec::new(), by_variant: BTreeMap::new() };
        for entry in entries {
            table.add(entry);
        }
        table
    }
}

impl From<MappingTable> for Vec<MappingEntry> {
    fn from(table: MappingTable) -> Self {
        table.entries
    }
}

impl Default for MappingTable {
    fn default() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled mapping table is valid")
    }
}

impl MappingTable {
    pub fn parse(text: &str) -> Result<Self, CodeSystemError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: &str| CodeSystemError::TableLine { line: line_no, reason: reason.to_string() };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 {
                return Err(err("expected 4 tab-separated columns"));
            }
            let variant = cols[0].to_lowercase();
            let len = variant.chars().count();
            if !(1..=2).contains(&len) {
                return Err(err("arabish variant must be 1 or 2 characters"));
            }
            if cols[1].is_empty() {
                return Err(err("empty arabic grapheme"));
            }
            let mut entry = MappingEntry::new(&variant, cols[1], cols[2]);
            for flag in cols[3].split(',').map(str::trim) {
                match flag {
                    "-" | "" => {}
                    "loanword" => entry.loanword_only = true,
                    "final" => entry.word_final = true,
                    other => return Err(err(&format!("unknown flag {other:?}"))),
                }
            }
            entries.push(entry);
        }
        Ok(entries.into())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# arabish_variant\tarabic_grapheme\tipa\tflags\n");
        for e in &self.entries {
            let _ = writeln!(out, "{}\t{}\t{}\t{}", e.arabish_variant, e.arabic_grapheme, e.ipa, e.flags());
        }
        out
    }

    pub fn entries(&self) -> &[MappingEntry] {
        &self.entries
    }

    /// Adds an entry. Duplicates are ignored, so paths are never removed.
    pub fn add(&mut self, entry: MappingEntry) {
        if self.entries.contains(&entry) {
            return;
        }
        self.by_variant.entry(entry.arabish_variant.clone()).or_default().push(self.entries.len());
        self.entries.push(entry);
    }

    pub fn is_variant(&self, unit: &str) -> bool {
        self.by_variant.contains_key(unit)
    }

    /// Arabic graphemes listed for `unit` under the given context.
    pub fn graphemes(&self, unit: &str, loanword: bool, word_final: bool) -> BTreeSet<String> {
        self.by_variant
            .get(unit)
            .into_iter()
            .flatten()
            .map(|&i| &self.entries[i])
            .filter(|e| (loanword || !e.loanword_only) && (word_final || !e.word_final))
            .map(|e| e.arabic_grapheme.clone())
            .collect()
    }

    /// All graphemes a unit can ever produce, whatever the context.
    pub fn all_graphemes(&self, unit: &str) -> BTreeSet<String> {
        self.graphemes(unit, true, true)
    }

    fn is_geminable(&self, c: char) -> bool {
        !SHORT_VOWELS.contains(&c) && !self.graphemes(&c.to_string(), false, false).is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UnitKind {
    /// Listed in the mapping table.
    Mapped,
    /// A short vowel letter with no table entry; only the empty candidate.
    Vowel,
    /// A doubled consonant, realised with a shadda.
    Geminate,
    /// Not known to the table; passed through verbatim.
    Unmapped,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphemeUnit {
    pub text: String,
    pub kind: UnitKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GraphemeSegmentation {
    pub units: Vec<GraphemeUnit>,
}

impl GraphemeSegmentation {
    pub fn texts(&self) -> Vec<&str> {
        self.units.iter().map(|u| u.text.as_str()).collect()
    }

    pub fn concat(&self) -> String {
        self.units.iter().map(|u| u.text.as_str()).collect()
    }
}

fn single_unit(table: &MappingTable, c: char) -> GraphemeUnit {
    let text = c.to_string();
    let kind = if table.is_variant(&text) {
        UnitKind::Mapped
    } else if SHORT_VOWELS.contains(&c) {
        UnitKind::Vowel
    } else {
        UnitKind::Unmapped
    };
    GraphemeUnit { text, kind }
}

fn double_unit(table: &MappingTable, a: char, b: char) -> Option<GraphemeUnit> {
    let text: String = [a, b].iter().collect();
    if table.is_variant(&text) {
        Some(GraphemeUnit { text, kind: UnitKind::Mapped })
    } else if a == b && table.is_geminable(a) {
        Some(GraphemeUnit { text, kind: UnitKind::Geminate })
    } else {
        None
    }
}

/// Every tiling of the lowercased token into grapheme units, longest unit
/// first at each step.
pub fn segment_graphemes(table: &MappingTable, token: &str) -> Vec<GraphemeSegmentation> {
    let chars: Vec<char> = token.to_lowercase().chars().collect();
    if chars.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    tile(table, &chars, 0, &mut current, &mut out);
    out
}

fn tile(
    table: &MappingTable,
    chars: &[char],
    at: usize,
    current: &mut Vec<GraphemeUnit>,
    out: &mut Vec<GraphemeSegmentation>,
) {
    if at == chars.len() {
        out.push(GraphemeSegmentation { units: current.clone() });
        return;
    }
    if at + 1 < chars.len() {
        if let Some(unit) = double_unit(table, chars[at], chars[at + 1]) {
            current.push(unit);
            tile(table, chars, at + 2, current, out);
            current.pop();
        }
    }
    current.push(single_unit(table, chars[at]));
    tile(table, chars, at + 1, current, out);
    current.pop();
}

/// Arabic candidates of one unit. Never empty: units the table cannot realise
/// in this context pass through verbatim.
pub fn unit_candidates(table: &MappingTable, unit: &GraphemeUnit, loanword: bool, word_final: bool) -> BTreeSet<String> {
    let mut candidates = match unit.kind {
        UnitKind::Mapped => table.graphemes(&unit.text, loanword, word_final),
        UnitKind::Vowel | UnitKind::Unmapped => BTreeSet::new(),
        UnitKind::Geminate => {
            let single: String = unit.text.chars().take(1).collect();
            table
                .graphemes(&single, loanword, false)
                .into_iter()
                .map(|g| format!("{g}{SHADDA}"))
                .collect()
        }
    };
    let mut chars = unit.text.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if SHORT_VOWELS.contains(&c) {
            candidates.insert(String::new());
        }
    }
    if candidates.is_empty() {
        candidates.insert(unit.text.clone());
    }
    candidates
}

/// Whether a unit has no realisation in the table for this context.
pub fn is_passthrough(table: &MappingTable, unit: &GraphemeUnit, loanword: bool, word_final: bool) -> bool {
    let c = unit_candidates(table, unit, loanword, word_final);
    c.len() == 1 && c.contains(&unit.text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeBranch {
    pub segmentation: GraphemeSegmentation,
    /// One non-empty candidate set per unit.
    pub positions: Vec<BTreeSet<String>>,
}

impl LatticeBranch {
    pub fn path_count(&self) -> u128 {
        self.positions.iter().fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128))
    }
}

/// Candidate transcriptions of a token: one branch per grapheme tiling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub branches: Vec<LatticeBranch>,
}

impl Lattice {
    pub fn path_count(&self) -> u128 {
        self.branches.iter().fold(0u128, |acc, b| acc.saturating_add(b.path_count()))
    }
}

pub fn branch_for(table: &MappingTable, segmentation: GraphemeSegmentation, loanword: bool) -> LatticeBranch {
    let last = segmentation.units.len().saturating_sub(1);
    let positions = segmentation
        .units
        .iter()
        .enumerate()
        .map(|(i, unit)| unit_candidates(table, unit, loanword, i == last))
        .collect();
    LatticeBranch { segmentation, positions }
}

/// Expands a normalized token into its candidate lattice.
pub fn expand(table: &MappingTable, token: &str, loanword: bool) -> Result<Lattice, CodeSystemError> {
    if token.is_empty() {
        return Err(CodeSystemError::EmptyToken);
    }
    let branches = segment_graphemes(table, token)
        .into_iter()
        .map(|seg| branch_for(table, seg, loanword))
        .collect();
    Ok(Lattice { branches })
}

/// Whether some path of the lattice spells `arabic`, by dynamic programming
/// over reachable offsets.
pub fn contains_path(lattice: &Lattice, arabic: &str) -> bool {
    lattice.branches.iter().any(|branch| branch_spells(branch, arabic))
}

fn branch_spells(branch: &LatticeBranch, arabic: &str) -> bool {
    let mut reachable = BTreeSet::from([0usize]);
    for candidates in &branch.positions {
        let mut next = BTreeSet::new();
        for &offset in &reachable {
            let rest = &arabic[offset..];
            for c in candidates {
                if rest.starts_with(c.as_str()) {
                    next.insert(offset + c.len());
                }
            }
        }
        if next.is_empty() {
            return false;
        }
        reachable = next;
    }
    reachable.contains(&arabic.len())
}
