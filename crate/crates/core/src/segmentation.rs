//! Clitic segmentation of Arabish tokens and the corpus range-row layout for
//! segmented tokens.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{TokenIndex, TokenRecord, MISSING};
use crate::normalization::MIN_NEGATED_STEM;

pub const DEFAULT_CLITICS: &str = include_str!("../data/clitics.tsv");

/// Joins the negation prefix and suffix on a merged particle row.
pub const PARTICLE_JOINER: char = '+';
const TATWEEL: char = 'ـ';
const MAX_PROCLITICS: usize = 3;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegmentationError {
    #[error("clitic inventory line {line}: {reason}")]
    InventoryLine { line: usize, reason: String },
    #[error("a range row needs at least two parts, got {0}")]
    TooFewParts(usize),
    #[error("expected {expected} arabic parts, got {found}")]
    Misaligned { expected: usize, found: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartKind {
    Proclitic,
    Stem,
    Enclitic,
    NegPrefix,
    NegSuffix,
}

impl PartKind {
    fn as_str(&self) -> &'static str {
        match self {
            PartKind::Proclitic => "proclitic",
            PartKind::Stem => "stem",
            PartKind::Enclitic => "enclitic",
            PartKind::NegPrefix => "neg_prefix",
            PartKind::NegSuffix => "neg_suffix",
        }
    }
}

impl std::str::FromStr for PartKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proclitic" => Ok(PartKind::Proclitic),
            "enclitic" => Ok(PartKind::Enclitic),
            "neg_prefix" => Ok(PartKind::NegPrefix),
            "neg_suffix" => Ok(PartKind::NegSuffix),
            other => Err(format!("unknown clitic kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Clitic {
    pub latin_forms: Vec<String>,
    pub arabic: String,
    pub kind: PartKind,
    pub pos: String,
    pub lemma: Option<String>,
}

impl Clitic {
    /// Proclitics attach in the order conjunction, preposition, article.
    fn slot(&self) -> u8 {
        match self.pos.as_str() {
            "cconj" => 0,
            "det" => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliticInventory {
    pub clitics: Vec<Clitic>,
}

impl Default for CliticInventory {
    fn default() -> Self {
        Self::parse(DEFAULT_CLITICS).expect("bundled clitic inventory is valid")
    }
}

impl CliticInventory {
    pub fn parse(text: &str) -> Result<Self, SegmentationError> {
        let mut clitics = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| SegmentationError::InventoryLine { line: i + 1, reason };
            let cols: Vec<&str> = line.split('\t').collect();
            if !(4..=5).contains(&cols.len()) {
                return Err(err("expected 4 or 5 tab-separated columns".into()));
            }
            let latin_forms: Vec<String> = cols[0].split(',').map(|f| f.trim().to_lowercase()).collect();
            if latin_forms.iter().any(String::is_empty) {
                return Err(err("empty latin form".into()));
            }
            let kind = cols[2].parse::<PartKind>().map_err(err)?;
            if cols[1].is_empty() || cols[3].is_empty() {
                return Err(err("arabic form and POS are required".into()));
            }
            clitics.push(Clitic {
                latin_forms,
                arabic: cols[1].to_string(),
                kind,
                pos: cols[3].to_string(),
                lemma: cols.get(4).filter(|l| !l.is_empty()).map(|l| l.to_string()),
            });
        }
        Ok(Self { clitics })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.clitics {
            let _ = write!(out, "{}\t{}\t{}\t{}", c.latin_forms.join(","), c.arabic, c.kind.as_str(), c.pos);
            if let Some(lemma) = &c.lemma {
                let _ = write!(out, "\t{lemma}");
            }
            out.push('\n');
        }
        out
    }

    fn of_kind(&self, kind: PartKind) -> impl Iterator<Item = (&str, &Clitic)> {
        self.clitics
            .iter()
            .filter(move |c| c.kind == kind)
            .flat_map(|c| c.latin_forms.iter().map(move |f| (f.as_str(), c)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Part {
    pub latin_slice: String,
    pub kind: PartKind,
    /// Fixed Arabic form for clitics; `None` for the stem.
    pub arabic: Option<String>,
    pub pos: Option<String>,
    pub lemma: Option<String>,
}

impl Part {
    fn stem(slice: &str) -> Self {
        Self { latin_slice: slice.to_string(), kind: PartKind::Stem, arabic: None, pos: None, lemma: None }
    }

    fn clitic(slice: &str, clitic: &Clitic) -> Self {
        Self {
            latin_slice: slice.to_string(),
            kind: clitic.kind,
            arabic: Some(clitic.arabic.clone()),
            pos: Some(clitic.pos.clone()),
            lemma: clitic.lemma.clone(),
        }
    }
}

/// An ordered split of a token into clitics and at most one stem.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segmentation {
    pub parts: Vec<Part>,
}

/// Morpheme layout of a segmentation: fixed morphemes around an optional stem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MorphemeFrame {
    pub before: Vec<String>,
    pub stem: Option<String>,
    pub after: Vec<String>,
}

impl Segmentation {
    pub fn concat(&self) -> String {
        self.parts.iter().map(|p| p.latin_slice.as_str()).collect()
    }

    pub fn stem(&self) -> Option<&Part> {
        self.parts.iter().find(|p| p.kind == PartKind::Stem)
    }

    pub fn is_negated(&self) -> bool {
        self.parts.iter().any(|p| p.kind == PartKind::NegPrefix)
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.len() == 1 && self.parts[0].kind == PartKind::Stem
    }

    /// Arabic morpheme slots in corpus order: the merged negation particle
    /// first, then proclitics, the stem and enclitics.
    pub fn frame(&self) -> MorphemeFrame {
        let mut before = Vec::new();
        let mut after = Vec::new();
        let mut stem = None;
        if let Some(particle) = self.particle_arabic() {
            before.push(particle);
        }
        for part in &self.parts {
            match part.kind {
                PartKind::Proclitic => before.push(part.arabic.clone().unwrap_or_default()),
                PartKind::Stem => stem = Some(part.latin_slice.clone()),
                PartKind::Enclitic => after.push(part.arabic.clone().unwrap_or_default()),
                PartKind::NegPrefix | PartKind::NegSuffix => {}
            }
        }
        MorphemeFrame { before, stem, after }
    }

    fn particle_arabic(&self) -> Option<String> {
        let prefix = self.parts.iter().find(|p| p.kind == PartKind::NegPrefix)?;
        let suffix = self.parts.iter().find(|p| p.kind == PartKind::NegSuffix)?;
        Some(format!(
            "{}{PARTICLE_JOINER}{}",
            prefix.arabic.as_deref().unwrap_or_default(),
            suffix.arabic.as_deref().unwrap_or_default()
        ))
    }

    /// Number of corpus rows: circumfix parts share one row.
    pub fn row_count(&self) -> usize {
        self.parts.iter().filter(|p| p.kind != PartKind::NegSuffix).count()
    }
}

impl std::fmt::Display for Segmentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| format!("{}({})", p.latin_slice, p.kind.as_str())).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Every segmentation licensed by the inventory, trivial one first, ordered
/// by part count.
pub fn segment(token: &str, inv: &CliticInventory) -> Vec<Segmentation> {
    let token = token.to_lowercase();
    let mut out: Vec<Segmentation> = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |parts: Vec<Part>, out: &mut Vec<Segmentation>| {
        let seg = Segmentation { parts };
        if seen.insert(seg.clone()) {
            out.push(seg);
        }
    };
    if token.is_empty() {
        return out;
    }

    let mut prefix_runs = Vec::new();
    proclitic_runs(&token, inv, 0, 0, &mut Vec::new(), &mut prefix_runs);
    for (consumed, procs) in &prefix_runs {
        let rest = &token[*consumed..];
        if rest.is_empty() {
            if procs.len() >= 2 {
                push(procs.clone(), &mut out);
            }
            continue;
        }
        push([procs.clone(), vec![Part::stem(rest)]].concat(), &mut out);
        for (form, clitic) in inv.of_kind(PartKind::Enclitic) {
            if let Some(stem) = rest.strip_suffix(form).filter(|s| !s.is_empty()) {
                push([procs.clone(), vec![Part::stem(stem), Part::clitic(form, clitic)]].concat(), &mut out);
            }
        }
    }

    for (pform, pclitic) in inv.of_kind(PartKind::NegPrefix) {
        let Some(after_prefix) = token.strip_prefix(pform) else { continue };
        for (sform, sclitic) in inv.of_kind(PartKind::NegSuffix) {
            let Some(middle) = after_prefix.strip_suffix(sform) else { continue };
            let mut options = vec![(middle, None)];
            for (eform, eclitic) in inv.of_kind(PartKind::Enclitic) {
                if let Some(stem) = middle.strip_suffix(eform) {
                    options.push((stem, Some((eform, eclitic))));
                }
            }
            for (stem, enclitic) in options {
                if stem.chars().count() < MIN_NEGATED_STEM {
                    continue;
                }
                let mut parts = vec![Part::clitic(pform, pclitic), Part::stem(stem)];
                if let Some((eform, eclitic)) = enclitic {
                    parts.push(Part::clitic(eform, eclitic));
                }
                parts.push(Part::clitic(sform, sclitic));
                push(parts, &mut out);
            }
        }
    }

    out.sort_by_key(|s| s.parts.len());
    out
}

fn proclitic_runs(
    token: &str,
    inv: &CliticInventory,
    consumed: usize,
    min_slot: u8,
    current: &mut Vec<Part>,
    out: &mut Vec<(usize, Vec<Part>)>,
) {
    out.push((consumed, current.clone()));
    if current.len() == MAX_PROCLITICS {
        return;
    }
    let rest = &token[consumed..];
    for (form, clitic) in inv.of_kind(PartKind::Proclitic) {
        if clitic.slot() < min_slot || !rest.starts_with(form) {
            continue;
        }
        current.push(Part::clitic(form, clitic));
        proclitic_runs(token, inv, consumed + form.len(), clitic.slot() + 1, current, out);
        current.pop();
    }
}

/// Fuses a morpheme sequence into the surface transcription: joining
/// tatweels are dropped and a negation particle `a+b` wraps the rest.
pub fn fuse_morphemes(morphemes: &[String]) -> String {
    let mut head = String::new();
    let mut tail = String::new();
    let mut body = String::new();
    let last = morphemes.len().saturating_sub(1);
    for (i, m) in morphemes.iter().enumerate() {
        if let Some((prefix, suffix)) = m.split_once(PARTICLE_JOINER) {
            head.push_str(prefix);
            head.push(' ');
            tail.insert_str(0, suffix);
        } else if i == last {
            body.push_str(m);
        } else {
            body.push_str(m.trim_end_matches(TATWEEL));
        }
    }
    format!("{head}{body}{tail}")
}

/// Lays out a segmented token as a range parent row followed by component
/// rows. Circumfix negation shares a single particle row.
pub fn to_range_rows(
    record: &TokenRecord,
    seg: &Segmentation,
    arabic_parts: &[String],
) -> Result<Vec<TokenRecord>, SegmentationError> {
    if seg.parts.len() < 2 {
        return Err(SegmentationError::TooFewParts(seg.parts.len()));
    }
    let rows = seg.row_count();
    if arabic_parts.len() != rows {
        return Err(SegmentationError::Misaligned { expected: rows, found: arabic_parts.len() });
    }
    let lo = record.w.lo();
    let hi = lo + rows as u32 - 1;

    let mut parent = record.clone();
    parent.w = if rows > 1 { TokenIndex::Range(lo, hi) } else { TokenIndex::Single(lo) };
    if parent.tra == MISSING {
        parent.tra = fuse_morphemes(arabic_parts);
    }

    let suffix = seg.parts.iter().find(|p| p.kind == PartKind::NegSuffix);
    let mut out = vec![parent];
    let component_parts = seg.parts.iter().filter(|p| p.kind != PartKind::NegSuffix);
    for (i, (part, arabic)) in component_parts.zip(arabic_parts).enumerate() {
        let mut row = record.clone();
        row.w = TokenIndex::Single(lo + i as u32);
        row.tra = arabic.clone();
        row.ita = MISSING.to_string();
        match part.kind {
            PartKind::Stem => {
                row.arabish = part.latin_slice.clone();
            }
            PartKind::NegPrefix => {
                let suffix_slice = suffix.map(|s| s.latin_slice.as_str()).unwrap_or_default();
                row.arabish = format!("{} + {}", part.latin_slice, suffix_slice);
                let (pre, post) = arabic.split_once(PARTICLE_JOINER).unwrap_or((arabic, ""));
                row.lem = format!("{post}+V+{pre}");
                row.pos = part.pos.clone().unwrap_or_else(|| "part".to_string());
            }
            _ => {
                row.arabish = part.latin_slice.clone();
                row.lem = part.lemma.clone().unwrap_or_else(|| arabic.clone());
                row.pos = part.pos.clone().unwrap_or_else(|| MISSING.to_string());
            }
        }
        out.push(row);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{range_surface_consistent, validate_records};

    fn inv() -> CliticInventory {
        CliticInventory::default()
    }

    fn shapes(token: &str) -> Vec<Vec<(String, PartKind)>> {
        segment(token, &inv())
            .into_iter()
            .map(|s| s.parts.into_iter().map(|p| (p.latin_slice, p.kind)).collect())
            .collect()
    }

    fn shape(parts: &[(&str, PartKind)]) -> Vec<(String, PartKind)> {
        parts.iter().map(|(s, k)| (s.to_string(), *k)).collect()
    }

    use PartKind::*;

    #[test]
    fn article_split() {
        let s = shapes("l3icha");
        assert_eq!(s[0], shape(&[("l3icha", Stem)]));
        assert!(s.contains(&shape(&[("l", Proclitic), ("3icha", Stem)])));
    }

    #[test]
    fn preposition_article_split() {
        assert!(shapes("fil").contains(&shape(&[("f", Proclitic), ("il", Proclitic)])));
    }

    #[test]
    fn bare_stem() {
        let s = shapes("3icha");
        assert!(s.contains(&shape(&[("3icha", Stem)])));
    }

    #[test]
    fn negation_split() {
        let s = shapes("manajemnech");
        assert!(s.contains(&shape(&[("ma", NegPrefix), ("najemne", Stem), ("ch", NegSuffix)])));
    }

    #[test]
    fn ordered_by_part_count() {
        let segs = segment("wfil3icha", &inv());
        assert!(segs.windows(2).all(|w| w[0].parts.len() <= w[1].parts.len()));
        assert!(segs.iter().all(|s| s.concat() == "wfil3icha"));
    }

    fn sample_record(w: u32, arabish: &str, tra: &str, lem: &str, pos: &str) -> TokenRecord {
        let mut r = TokenRecord::unannotated("3fE", "150902", 2, w, arabish);
        r.tra = tra.into();
        r.lem = lem.into();
        r.pos = pos.into();
        r.var = "Bnz".into();
        r.ita = "la vita".into();
        r
    }

    #[test]
    fn l3icha_rows() {
        let record = sample_record(3, "l3icha", "-", "عيشة", "noun");
        let seg = segment("l3icha", &inv())
            .into_iter()
            .find(|s| s.parts.len() == 2 && s.parts[0].kind == Proclitic)
            .unwrap();
        let rows = to_range_rows(&record, &seg, &["الـ".into(), "عيشة".into()]).unwrap();
        let view: Vec<_> = rows.iter().map(|r| (r.w.to_string(), r.arabish.as_str(), r.tra.as_str(), r.lem.as_str(), r.pos.as_str())).collect();
        assert_eq!(
            view,
            vec![
                ("3-4".to_string(), "l3icha", "العيشة", "عيشة", "noun"),
                ("3".to_string(), "l", "الـ", "الـ", "det"),
                ("4".to_string(), "3icha", "عيشة", "عيشة", "noun"),
            ]
        );
        assert!(validate_records(&rows).is_ok());
        assert!(range_surface_consistent(&rows[0], &rows[1..]));
    }

    #[test]
    fn fil_rows_fuse() {
        let record = sample_record(5, "fil", "-", "في", "prep");
        let seg = segment("fil", &inv())
            .into_iter()
            .find(|s| s.parts.iter().all(|p| p.kind == Proclitic) && s.parts.len() == 2 && s.parts[0].latin_slice == "f")
            .unwrap();
        let rows = to_range_rows(&record, &seg, &["فـ".into(), "الـ".into()]).unwrap();
        assert_eq!(rows[0].tra, "فالـ");
        assert_eq!(rows[1].lem, "في");
        assert_eq!(rows[2].pos, "det");
    }

    #[test]
    fn negation_rows() {
        let record = sample_record(14, "manajemnech", "-", "نجّم", "verb");
        let seg = segment("manajemnech", &inv())
            .into_iter()
            .find(|s| s.is_negated() && s.stem().unwrap().latin_slice == "najemne" && s.parts.len() == 3)
            .unwrap();
        let rows = to_range_rows(&record, &seg, &["ما+ش".into(), "نجمنا".into()]).unwrap();
        let view: Vec<_> = rows.iter().map(|r| (r.w.to_string(), r.arabish.as_str(), r.tra.as_str(), r.pos.as_str())).collect();
        assert_eq!(
            view,
            vec![
                ("14-15".to_string(), "manajemnech", "ما نجمناش", "verb"),
                ("14".to_string(), "ma + ch", "ما+ش", "part"),
                ("15".to_string(), "najemne", "نجمنا", "verb"),
            ]
        );
        assert_eq!(rows[1].lem, "ش+V+ما");
        assert!(validate_records(&rows).is_ok());
        assert!(range_surface_consistent(&rows[0], &rows[1..]));
    }

    #[test]
    fn single_part_is_rejected() {
        let record = sample_record(1, "kifech", "-", "-", "adv");
        let seg = segment("kifech", &inv()).remove(0);
        assert_eq!(to_range_rows(&record, &seg, &["كيفاش".into()]), Err(SegmentationError::TooFewParts(1)));
    }

    #[test]
    fn misaligned_parts() {
        let record = sample_record(3, "l3icha", "-", "-", "noun");
        let seg = segment("l3icha", &inv()).into_iter().find(|s| s.parts.len() == 2).unwrap();
        assert_eq!(
            to_range_rows(&record, &seg, &["الـ".into()]),
            Err(SegmentationError::Misaligned { expected: 2, found: 1 })
        );
    }

    #[test]
    fn frame_layout() {
        let seg = segment("manajemnech", &inv()).into_iter().find(|s| s.is_negated()).unwrap();
        let frame = seg.frame();
        assert_eq!(frame.before, vec!["ما+ش".to_string()]);
        assert!(frame.stem.is_some());
    }

    #[test]
    fn inventory_round_trip() {
        let i = inv();
        assert_eq!(CliticInventory::parse(&i.to_text()).unwrap(), i);
        assert!(CliticInventory::parse("l\tال\tweird\tdet").is_err());
    }
}
