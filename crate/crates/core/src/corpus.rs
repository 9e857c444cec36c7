//! Corpus rows, the 12-column TSV file format and sentence reconstruction.
//!
//! A row whose `W` cell is a range `lo-hi` is a segmented token: it is
//! immediately followed by one component row per index in `lo..=hi`. The
//! parent keeps the fused transcription, the components carry the morphemes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Column labels, in file order.
pub const HEADER: [&str; 12] = [
    "Cor", "Textco", "Par", "W", "ArabiS", "Tra", "Ita", "Lem", "POS", "Var", "Age", "Gen",
];

/// Placeholder for an absent or inapplicable cell.
pub const MISSING: &str = "-";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("missing header line")]
    MissingHeader,
    #[error("line 1: unexpected header {found:?}")]
    BadHeader { found: String },
    #[error("line {line}: expected 12 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid {column} value {value:?}: {reason}")]
    InvalidField {
        line: usize,
        column: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("line {line}: range row {w} {reason}")]
    RangeGroup { line: usize, w: String, reason: String },
    #[error("record {index}: {reason}")]
    InvalidRecord { index: usize, reason: String },
    #[error("duplicate token index {w} in sentence {key}")]
    DuplicateIndex { key: String, w: String },
}

/// Position of a token in its sentence: a single index or an inclusive range
/// marking a segmented token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TokenIndex {
    Single(u32),
    Range(u32, u32),
}

impl TokenIndex {
    pub fn lo(&self) -> u32 {
        match *self {
            TokenIndex::Single(w) => w,
            TokenIndex::Range(lo, _) => lo,
        }
    }

    pub fn hi(&self) -> u32 {
        match *self {
            TokenIndex::Single(w) => w,
            TokenIndex::Range(_, hi) => hi,
        }
    }

    pub fn is_range(&self) -> bool {
        matches!(self, TokenIndex::Range(..))
    }

    /// Number of component rows that must follow a range row.
    pub fn span(&self) -> usize {
        (self.hi() - self.lo() + 1) as usize
    }

    pub fn contains(&self, w: u32) -> bool {
        self.lo() <= w && w <= self.hi()
    }
}

impl fmt::Display for TokenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokenIndex::Single(w) => write!(f, "{w}"),
            TokenIndex::Range(lo, hi) => write!(f, "{lo}-{hi}"),
        }
    }
}

impl FromStr for TokenIndex {
    type Err = &'static str;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once('-') {
            None => {
                let w = parse_positive(s)?;
                Ok(TokenIndex::Single(w))
            }
            Some((lo, hi)) => {
                let lo = parse_positive(lo)?;
                let hi = parse_positive(hi)?;
                if lo >= hi {
                    return Err("range must satisfy lo < hi");
                }
                Ok(TokenIndex::Range(lo, hi))
            }
        }
    }
}

impl TryFrom<String> for TokenIndex {
    type Error = &'static str;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<TokenIndex> for String {
    fn from(value: TokenIndex) -> Self {
        value.to_string()
    }
}

/// Canonical positive integer: no sign, no leading zeros.
fn parse_positive(s: &str) -> Result<u32, &'static str> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err("not a positive integer");
    }
    if s.len() > 1 && s.starts_with('0') {
        return Err("leading zeros are not allowed");
    }
    match s.parse::<u32>() {
        Ok(0) => Err("must be at least 1"),
        Ok(v) => Ok(v),
        Err(_) => Err("integer out of range"),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgeRange {
    #[serde(rename = "10-25")]
    From10To25,
    #[serde(rename = "25-35")]
    From25To35,
    #[serde(rename = "35-50")]
    From35To50,
    #[serde(rename = "50-90")]
    From50To90,
}

impl AgeRange {
    pub const ALL: [AgeRange; 4] = [
        AgeRange::From10To25,
        AgeRange::From25To35,
        AgeRange::From35To50,
        AgeRange::From50To90,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AgeRange::From10To25 => "10-25",
            AgeRange::From25To35 => "25-35",
            AgeRange::From35To50 => "35-50",
            AgeRange::From50To90 => "50-90",
        }
    }

    /// Buckets an age. Ranges are left-closed and right-open, except that 90
    /// still belongs to the last range.
    pub fn bucket(age: u32) -> Option<AgeRange> {
        match age {
            10..=24 => Some(AgeRange::From10To25),
            25..=34 => Some(AgeRange::From25To35),
            35..=49 => Some(AgeRange::From35To50),
            50..=90 => Some(AgeRange::From50To90),
            _ => None,
        }
    }
}

impl fmt::Display for AgeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AgeRange {
    type Err = &'static str;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AgeRange::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or("expected one of 10-25, 25-35, 35-50, 50-90")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    M,
    F,
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::M => "M",
            Gender::F => "F",
        })
    }
}

impl FromStr for Gender {
    type Err = &'static str;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "M" => Ok(Gender::M),
            "F" => Ok(Gender::F),
            _ => Err("expected M or F"),
        }
    }
}

/// One corpus row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TokenRecord {
    pub cor: String,
    pub textco: String,
    pub par: u32,
    pub w: TokenIndex,
    pub arabish: String,
    pub tra: String,
    pub ita: String,
    pub lem: String,
    pub pos: String,
    pub var: String,
    /// `None` is written as `-`.
    pub age: Option<AgeRange>,
    pub gen: Option<Gender>,
}

impl TokenRecord {
    /// A bare record: surface form and position only, every annotation `-`.
    pub fn unannotated(cor: &str, textco: &str, par: u32, w: u32, arabish: &str) -> Self {
        Self {
            cor: cor.to_string(),
            textco: textco.to_string(),
            par,
            w: TokenIndex::Single(w),
            arabish: arabish.to_string(),
            tra: MISSING.to_string(),
            ita: MISSING.to_string(),
            lem: MISSING.to_string(),
            pos: MISSING.to_string(),
            var: MISSING.to_string(),
            age: None,
            gen: None,
        }
    }

    pub fn sentence_key(&self) -> SentenceKey {
        SentenceKey {
            cor: self.cor.clone(),
            textco: self.textco.clone(),
            par: self.par,
        }
    }

    /// Key unique within a corpus: `cor/textco/par/w`.
    pub fn key(&self) -> String {
        format!("{}/{}/{}/{}", self.cor, self.textco, self.par, self.w)
    }

    fn cells(&self) -> [String; 12] {
        [
            self.cor.clone(),
            self.textco.clone(),
            self.par.to_string(),
            self.w.to_string(),
            self.arabish.clone(),
            self.tra.clone(),
            self.ita.clone(),
            self.lem.clone(),
            self.pos.clone(),
            self.var.clone(),
            self.age.map_or_else(|| MISSING.to_string(), |a| a.to_string()),
            self.gen.map_or_else(|| MISSING.to_string(), |g| g.to_string()),
        ]
    }

    /// Field-level checks that do not depend on neighbouring rows.
    pub fn check_fields(&self) -> Result<(), (&'static str, String, &'static str)> {
        if !is_textco(&self.textco) {
            return Err(("Textco", self.textco.clone(), "expected 6 digits (YYMMDD)"));
        }
        if self.par == 0 {
            return Err(("Par", "0".into(), "must be at least 1"));
        }
        match self.w {
            TokenIndex::Single(0) | TokenIndex::Range(0, _) => {
                return Err(("W", self.w.to_string(), "must be at least 1"))
            }
            TokenIndex::Range(lo, hi) if lo >= hi => {
                return Err(("W", self.w.to_string(), "range must satisfy lo < hi"))
            }
            _ => {}
        }
        let text_fields = [
            ("Cor", &self.cor),
            ("ArabiS", &self.arabish),
            ("Tra", &self.tra),
            ("Ita", &self.ita),
            ("Lem", &self.lem),
            ("POS", &self.pos),
            ("Var", &self.var),
        ];
        for (column, value) in text_fields {
            if let Err(reason) = check_text(value) {
                return Err((column, value.clone(), reason));
            }
        }
        Ok(())
    }
}

fn is_textco(s: &str) -> bool {
    s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit())
}

fn check_text(s: &str) -> Result<(), &'static str> {
    if s.is_empty() {
        return Err("empty cell (use - for missing values)");
    }
    if s.contains(['\t', '\n', '\r']) {
        return Err("tabs and line breaks are not allowed inside a cell");
    }
    Ok(())
}

/// Identifies a sentence: source, date and paragraph index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceKey {
    pub cor: String,
    pub textco: String,
    pub par: u32,
}

impl fmt::Display for SentenceKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.cor, self.textco, self.par)
    }
}

/// A surface token with its component rows (empty unless it was segmented).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurfaceToken {
    pub token: TokenRecord,
    pub components: Vec<TokenRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub key: SentenceKey,
    /// Surface tokens ordered by their first index.
    pub tokens: Vec<SurfaceToken>,
}

impl Sentence {
    pub fn surface_forms(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.token.arabish.as_str())
    }
}

pub fn parse_tsv(bytes: &[u8]) -> Result<Vec<TokenRecord>, CorpusError> {
    let text = std::str::from_utf8(bytes).map_err(|_| CorpusError::Encoding)?;
    let body = text.strip_suffix('\n').unwrap_or(text);
    let mut lines = body.split('\n');
    let header = lines.next().filter(|h| !h.is_empty()).ok_or(CorpusError::MissingHeader)?;
    if header != HEADER.join("\t") {
        return Err(CorpusError::BadHeader { found: header.to_string() });
    }

    let mut records = Vec::new();
    let mut lines_of = Vec::new();
    for (offset, line) in lines.enumerate() {
        let line_no = offset + 2;
        if line.is_empty() {
            return Err(CorpusError::ColumnCount { line: line_no, found: 0 });
        }
        records.push(parse_line(line, line_no)?);
        lines_of.push(line_no);
    }
    check_range_groups(&records).map_err(|(index, w, reason)| CorpusError::RangeGroup {
        line: lines_of[index],
        w,
        reason,
    })?;
    Ok(records)
}

fn parse_line(line: &str, line_no: usize) -> Result<TokenRecord, CorpusError> {
    let cells: Vec<&str> = line.split('\t').collect();
    if cells.len() != HEADER.len() {
        return Err(CorpusError::ColumnCount { line: line_no, found: cells.len() });
    }
    let invalid = |column: &'static str, value: &str, reason: &'static str| CorpusError::InvalidField {
        line: line_no,
        column,
        value: value.to_string(),
        reason,
    };
    if cells[3].is_empty() {
        return Err(invalid("W", cells[3], "not a positive integer"));
    }
    let par = parse_positive(cells[2]).map_err(|r| invalid("Par", cells[2], r))?;
    let w = cells[3].parse::<TokenIndex>().map_err(|r| invalid("W", cells[3], r))?;
    let age = match cells[10] {
        MISSING => None,
        s => Some(s.parse::<AgeRange>().map_err(|r| invalid("Age", s, r))?),
    };
    let gen = match cells[11] {
        MISSING => None,
        s => Some(s.parse::<Gender>().map_err(|r| invalid("Gen", s, r))?),
    };
    let record = TokenRecord {
        cor: cells[0].to_string(),
        textco: cells[1].to_string(),
        par,
        w,
        arabish: cells[4].to_string(),
        tra: cells[5].to_string(),
        ita: cells[6].to_string(),
        lem: cells[7].to_string(),
        pos: cells[8].to_string(),
        var: cells[9].to_string(),
        age,
        gen,
    };
    record
        .check_fields()
        .map_err(|(column, value, reason)| invalid(column, &value, reason))?;
    Ok(record)
}

/// Checks that every range row is followed by exactly its component rows.
fn check_range_groups(records: &[TokenRecord]) -> Result<(), (usize, String, String)> {
    let mut i = 0;
    while i < records.len() {
        let parent = &records[i];
        if let TokenIndex::Range(lo, hi) = parent.w {
            let w = parent.w.to_string();
            for (offset, expected) in (lo..=hi).enumerate() {
                let Some(component) = records.get(i + 1 + offset) else {
                    return Err((i, w, format!("is missing component row {expected}")));
                };
                if component.w != TokenIndex::Single(expected) {
                    return Err((i, w, format!("expected component row {expected}, found {}", component.w)));
                }
                if component.sentence_key() != parent.sentence_key() {
                    return Err((i, w, format!("component row {expected} belongs to another sentence")));
                }
            }
            i += 1 + parent.w.span();
        } else {
            i += 1;
        }
    }
    Ok(())
}

/// Validates a record list the way [`write_tsv`] does, reporting the first
/// offending record index.
pub fn validate_records(records: &[TokenRecord]) -> Result<(), CorpusError> {
    for (index, record) in records.iter().enumerate() {
        record.check_fields().map_err(|(column, value, reason)| CorpusError::InvalidRecord {
            index,
            reason: format!("invalid {column} value {value:?}: {reason}"),
        })?;
    }
    check_range_groups(records)
        .map_err(|(index, w, reason)| CorpusError::InvalidRecord { index, reason: format!("range row {w} {reason}") })
}

pub fn write_tsv(records: &[TokenRecord]) -> Result<Vec<u8>, CorpusError> {
    validate_records(records)?;
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(&HEADER.join("\t"));
    out.push('\n');
    for record in records {
        out.push_str(&record.cells().join("\t"));
        out.push('\n');
    }
    Ok(out.into_bytes())
}

/// Surface units of a validated, file-ordered record list: the index of each
/// non-component row and the index range of its components.
pub fn surface_units(records: &[TokenRecord]) -> Vec<(usize, std::ops::Range<usize>)> {
    let mut units = Vec::new();
    let mut i = 0;
    while i < records.len() {
        let span = if records[i].w.is_range() { records[i].w.span() } else { 0 };
        let end = (i + 1 + span).min(records.len());
        units.push((i, i + 1..end));
        i = end;
    }
    units
}

/// Whether component surfaces rebuild the parent surface. Case and hyphens
/// are ignored; a component written `a + b` wraps the remaining components.
pub fn range_surface_consistent(parent: &TokenRecord, components: &[TokenRecord]) -> bool {
    let clean = |s: &str| s.to_lowercase().replace('-', "");
    let mut prefix = String::new();
    let mut middle = String::new();
    let mut suffix = String::new();
    for component in components {
        match component.arabish.split_once('+') {
            Some((head, tail)) => {
                prefix.push_str(&clean(head.trim()));
                suffix.insert_str(0, &clean(tail.trim()));
            }
            None => middle.push_str(&clean(&component.arabish)),
        }
    }
    format!("{prefix}{middle}{suffix}") == clean(&parent.arabish)
}

/// Groups records into sentences keyed by (cor, textco, par), ordering tokens
/// by index. The result does not depend on input order.
pub fn reconstruct_sentences(records: &[TokenRecord]) -> Result<Vec<Sentence>, CorpusError> {
    let mut groups: BTreeMap<SentenceKey, Vec<&TokenRecord>> = BTreeMap::new();
    for record in records {
        groups.entry(record.sentence_key()).or_default().push(record);
    }

    let mut sentences = Vec::with_capacity(groups.len());
    for (key, rows) in groups {
        let duplicate = |w: TokenIndex| CorpusError::DuplicateIndex { key: key.to_string(), w: w.to_string() };

        let mut ranges: BTreeMap<u32, SurfaceToken> = BTreeMap::new();
        for row in rows.iter().filter(|r| r.w.is_range()) {
            let overlapping = ranges.values().any(|t| t.token.w.lo() <= row.w.hi() && row.w.lo() <= t.token.w.hi());
            if overlapping {
                return Err(duplicate(row.w));
            }
            ranges.insert(row.w.lo(), SurfaceToken { token: (*row).clone(), components: Vec::new() });
        }

        let mut singles: BTreeMap<u32, SurfaceToken> = BTreeMap::new();
        for row in rows.iter().filter(|r| !r.w.is_range()) {
            let w = row.w.lo();
            let parent = ranges.range_mut(..=w).next_back().map(|(_, t)| t).filter(|t| t.token.w.contains(w));
            match parent {
                Some(parent) => {
                    if parent.components.iter().any(|c| c.w == row.w) {
                        return Err(duplicate(row.w));
                    }
                    parent.components.push((*row).clone());
                }
                None => {
                    if singles.insert(w, SurfaceToken { token: (*row).clone(), components: Vec::new() }).is_some() {
                        return Err(duplicate(row.w));
                    }
                }
            }
        }

        let mut tokens: Vec<SurfaceToken> = ranges.into_values().chain(singles.into_values()).collect();
        for token in &mut tokens {
            token.components.sort_by_key(|c| c.w);
        }
        tokens.sort_by_key(|t| t.token.w.lo());
        sentences.push(Sentence { key, tokens });
    }
    Ok(sentences)
}

/// Flattens sentences back to file order (parent row, then components).
pub fn flatten_sentences(sentences: &[Sentence]) -> Vec<TokenRecord> {
    sentences
        .iter()
        .flat_map(|s| s.tokens.iter())
        .flat_map(|t| std::iter::once(t.token.clone()).chain(t.components.iter().cloned()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const KIFECH: &str = "3fE\t150902\t2\t1\tkifech\tكيفاش\tcome\tكيفاش\tadv\tBnz\t25-35\tM";

    fn doc(lines: &[&str]) -> Vec<u8> {
        let mut s = HEADER.join("\t");
        s.push('\n');
        for l in lines {
            s.push_str(l);
            s.push('\n');
        }
        s.into_bytes()
    }

    #[test]
    fn parses_single_row() {
        let records = parse_tsv(&doc(&[KIFECH])).unwrap();
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert_eq!(r.w, TokenIndex::Single(1));
        assert_eq!(r.pos, "adv");
        assert_eq!(r.tra, "كيفاش");
        assert_eq!(r.age, Some(AgeRange::From25To35));
        assert_eq!(r.gen, Some(Gender::M));
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_tsv(&doc(&[])).unwrap().is_empty());
        let no_newline = HEADER.join("\t");
        assert!(parse_tsv(no_newline.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn missing_header() {
        assert_eq!(parse_tsv(b""), Err(CorpusError::MissingHeader));
        assert!(matches!(parse_tsv(KIFECH.as_bytes()), Err(CorpusError::BadHeader { .. })));
    }

    #[test]
    fn column_count_reported_with_line() {
        let err = parse_tsv(&doc(&[KIFECH, "3fE\t150902\t2"])).unwrap_err();
        assert_eq!(err, CorpusError::ColumnCount { line: 3, found: 3 });
    }

    #[test]
    fn blank_line_in_the_middle_is_rejected() {
        let err = parse_tsv(&doc(&[KIFECH, "", KIFECH])).unwrap_err();
        assert_eq!(err, CorpusError::ColumnCount { line: 3, found: 0 });
    }

    #[test]
    fn bad_integers_and_metadata() {
        let bad_par = KIFECH.replacen("\t2\t", "\tx\t", 1);
        assert!(matches!(
            parse_tsv(&doc(&[&bad_par])),
            Err(CorpusError::InvalidField { column: "Par", line: 2, .. })
        ));
        let bad_w = KIFECH.replacen("\t1\t", "\t0\t", 1);
        assert!(matches!(parse_tsv(&doc(&[&bad_w])), Err(CorpusError::InvalidField { column: "W", .. })));
        let bad_age = KIFECH.replace("25-35", "20-30");
        assert!(matches!(parse_tsv(&doc(&[&bad_age])), Err(CorpusError::InvalidField { column: "Age", .. })));
        let bad_gen = KIFECH.replace("\tM", "\tX");
        assert!(matches!(parse_tsv(&doc(&[&bad_gen])), Err(CorpusError::InvalidField { column: "Gen", .. })));
        let leading_zero = KIFECH.replacen("\t2\t", "\t02\t", 1);
        assert!(parse_tsv(&doc(&[&leading_zero])).is_err());
    }

    #[test]
    fn dash_is_missing_not_a_range() {
        assert!("-".parse::<AgeRange>().is_err());
        assert!("-".parse::<Gender>().is_err());
        let missing = KIFECH.replace("25-35\tM", "-\t-");
        let r = &parse_tsv(&doc(&[&missing])).unwrap()[0];
        assert_eq!((r.age, r.gen), (None, None));
    }

    #[test]
    fn range_row_needs_components() {
        let parent = "3fE\t150902\t2\t3-4\tl3icha\tالعيشة\tla vita\tعيشة\tnoun\tBnz\t25-35\tM";
        let c3 = "3fE\t150902\t2\t3\tl\tالـ\t-\tالـ\tdet\tBnz\t25-35\tM";
        let c4 = "3fE\t150902\t2\t4\t3icha\tعيشة\t-\tعيشة\tnoun\tBnz\t25-35\tM";
        let ok = parse_tsv(&doc(&[parent, c3, c4])).unwrap();
        assert_eq!(ok.len(), 3);
        assert!(range_surface_consistent(&ok[0], &ok[1..]));

        let err = parse_tsv(&doc(&[parent, c3])).unwrap_err();
        assert!(matches!(err, CorpusError::RangeGroup { line: 2, .. }));
        let err = parse_tsv(&doc(&[parent, c4, c3])).unwrap_err();
        assert!(matches!(err, CorpusError::RangeGroup { .. }));
    }

    #[test]
    fn write_reports_first_bad_record() {
        let mut r = TokenRecord::unannotated("3fE", "150902", 1, 1, "kelb");
        assert!(write_tsv(&[r.clone()]).is_ok());
        r.textco = "2015".into();
        let err = write_tsv(&[TokenRecord::unannotated("3fE", "150902", 1, 1, "a"), r]).unwrap_err();
        assert!(matches!(err, CorpusError::InvalidRecord { index: 1, .. }));
    }

    #[test]
    fn empty_write_is_header_only() {
        let bytes = write_tsv(&[]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), format!("{}\n", HEADER.join("\t")));
    }

    #[test]
    fn single_record_sentence() {
        let r = TokenRecord::unannotated("3fE", "150902", 1, 1, "kelb");
        let s = reconstruct_sentences(&[r]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].tokens.len(), 1);
    }

    #[test]
    fn duplicate_index_rejected() {
        let r = TokenRecord::unannotated("3fE", "150902", 1, 1, "kelb");
        assert!(matches!(
            reconstruct_sentences(&[r.clone(), r]),
            Err(CorpusError::DuplicateIndex { .. })
        ));
    }

    #[test]
    fn circumfix_component_wraps() {
        let mut parent = TokenRecord::unannotated("x", "150902", 1, 14, "manajem-nech");
        parent.w = TokenIndex::Range(14, 15);
        let particle = TokenRecord::unannotated("x", "150902", 1, 14, "ma + ch");
        let stem = TokenRecord::unannotated("x", "150902", 1, 15, "najemne");
        assert!(range_surface_consistent(&parent, &[particle, stem]));
    }
}
