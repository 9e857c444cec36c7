//! Token clean-up applied before transcription: prosodic letter repetition,
//! code-switching detection, the negation circumfix and the glottal-stop
//! convention for candidate transcriptions.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Sentence;

pub const DEFAULT_LEXICON: &str = include_str!("../data/lexicon.tsv");

/// Negation prefixes, tried in order.
pub const NEGATION_PREFIXES: [&str; 3] = ["ma", "me", "m"];
/// Negation suffixes, tried in order.
pub const NEGATION_SUFFIXES: [&str; 3] = ["ch", "ech", "ich"];

const HAMZA: char = 'ء';

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LexiconError {
    #[error("lexicon line {line}: {reason}")]
    Line { line: usize, reason: String },
    #[error("{word:?} cannot be both a loanword and a code-switching term")]
    Conflict { word: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFlag {
    CodeSwitch,
    Loanword,
    GlottalException,
    NegationCircumfix,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationReport {
    pub original: String,
    pub normalized: String,
    /// `(position, length)` of each collapsed run, in characters of `original`.
    pub collapsed_runs: Vec<(usize, usize)>,
    pub flags: BTreeSet<NormFlag>,
}

impl NormalizationReport {
    /// Undoes the recorded collapses.
    pub fn restore(&self) -> String {
        let mut out = String::with_capacity(self.original.len());
        let mut runs = self.collapsed_runs.iter().peekable();
        let mut position = 0;
        for c in self.normalized.chars() {
            match runs.peek() {
                Some(&&(start, len)) if start == position => {
                    out.extend(std::iter::repeat_n(c, len));
                    position += len;
                    runs.next();
                }
                _ => {
                    out.push(c);
                    position += 1;
                }
            }
        }
        out
    }
}

/// Glottal-stop exceptions, acclimatized loanwords and foreign vocabulary.
///
/// Updates return a new snapshot; a shared lexicon is never mutated.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionLexicon {
    pub glottal_words: BTreeSet<String>,
    pub loanwords: BTreeSet<String>,
    pub code_switch_vocab: BTreeSet<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LexiconCategory {
    Glottal,
    Loanword,
    Codeswitch,
}

impl LexiconCategory {
    fn as_str(&self) -> &'static str {
        match self {
            LexiconCategory::Glottal => "glottal",
            LexiconCategory::Loanword => "loanword",
            LexiconCategory::Codeswitch => "codeswitch",
        }
    }
}

impl std::str::FromStr for LexiconCategory {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "glottal" => Ok(LexiconCategory::Glottal),
            "loanword" => Ok(LexiconCategory::Loanword),
            "codeswitch" => Ok(LexiconCategory::Codeswitch),
            other => Err(format!("unknown category {other:?}")),
        }
    }
}

impl ExceptionLexicon {
    /// The bundled seed lexicon.
    pub fn seed() -> Self {
        Self::parse(DEFAULT_LEXICON).expect("bundled lexicon is valid")
    }

    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = ExceptionLexicon::default();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| LexiconError::Line { line: i + 1, reason };
            let (word, category) = line
                .split_once('\t')
                .ok_or_else(|| err("expected word<TAB>category".to_string()))?;
            let category = category.trim().parse::<LexiconCategory>().map_err(err)?;
            if word.is_empty() {
                return Err(err("empty word".to_string()));
            }
            lex.insert(word, category)?;
        }
        Ok(lex)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sets = [
            (LexiconCategory::Glottal, &self.glottal_words),
            (LexiconCategory::Loanword, &self.loanwords),
            (LexiconCategory::Codeswitch, &self.code_switch_vocab),
        ];
        for (category, words) in sets {
            for w in words {
                let _ = writeln!(out, "{w}\t{}", category.as_str());
            }
        }
        out
    }

    fn insert(&mut self, word: &str, category: LexiconCategory) -> Result<(), LexiconError> {
        match category {
            LexiconCategory::Glottal => {
                self.glottal_words.insert(word.to_string());
            }
            LexiconCategory::Loanword | LexiconCategory::Codeswitch => {
                let key = latin_key(word);
                let (target, other) = if category == LexiconCategory::Loanword {
                    (&mut self.loanwords, &self.code_switch_vocab)
                } else {
                    (&mut self.code_switch_vocab, &self.loanwords)
                };
                if other.contains(&key) {
                    return Err(LexiconError::Conflict { word: key });
                }
                target.insert(key);
            }
        }
        Ok(())
    }

    /// Copy-on-update insertion.
    pub fn with_entry(&self, word: &str, category: LexiconCategory) -> Result<Self, LexiconError> {
        let mut next = self.clone();
        next.insert(word, category)?;
        Ok(next)
    }

    pub fn is_loanword(&self, token: &str) -> bool {
        self.loanwords.contains(&latin_key(token))
    }
}

/// Lookup key for Latin words: lowercased, prosody collapsed.
pub fn latin_key(token: &str) -> String {
    collapse_prosody(&token.to_lowercase()).normalized
}

/// Collapses every run of three or more identical letters to one letter.
/// Doubled letters are kept. Case is preserved.
pub fn collapse_prosody(token: &str) -> NormalizationReport {
    let chars: Vec<char> = token.chars().collect();
    let mut normalized = String::with_capacity(token.len());
    let mut collapsed_runs = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let mut j = i + 1;
        while j < chars.len() && chars[j] == c {
            j += 1;
        }
        let len = j - i;
        if len >= 3 && c.is_alphanumeric() {
            normalized.push(c);
            collapsed_runs.push((i, len));
        } else {
            normalized.extend(&chars[i..j]);
        }
        i = j;
    }
    NormalizationReport {
        original: token.to_string(),
        normalized,
        collapsed_runs,
        flags: BTreeSet::new(),
    }
}

/// Full pre-transcription normalization: lowercasing, prosody collapse and
/// lexicon/negation flags. `original` in the report is the lowercased token.
pub fn normalize(token: &str, lex: &ExceptionLexicon) -> NormalizationReport {
    let mut report = collapse_prosody(&token.to_lowercase());
    if lex.code_switch_vocab.contains(&report.normalized) {
        report.flags.insert(NormFlag::CodeSwitch);
    }
    if lex.loanwords.contains(&report.normalized) {
        report.flags.insert(NormFlag::Loanword);
    }
    if detect_negation_circumfix(&report.normalized).is_some() {
        report.flags.insert(NormFlag::NegationCircumfix);
    }
    report
}

pub fn detect_code_switch(token: &str, lex: &ExceptionLexicon) -> bool {
    lex.code_switch_vocab.contains(&latin_key(token))
}

/// Splits sentences into those free of code-switching and those containing
/// at least one code-switched surface token.
pub fn filter_code_switch_sentences(sentences: Vec<Sentence>, lex: &ExceptionLexicon) -> (Vec<Sentence>, Vec<Sentence>) {
    sentences
        .into_iter()
        .partition(|s| !s.surface_forms().any(|t| detect_code_switch(t, lex)))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circumfix {
    pub prefix: String,
    pub stem: String,
    pub suffix: String,
}

/// Minimum stem length inside a negation circumfix, in characters.
pub const MIN_NEGATED_STEM: usize = 2;

/// All prefix/stem/suffix splits licensed by the given marker lists.
pub fn circumfix_splits(token: &str, prefixes: &[&str], suffixes: &[&str]) -> Vec<Circumfix> {
    let lower = token.to_lowercase();
    let mut out = Vec::new();
    for prefix in prefixes {
        let Some(rest) = lower.strip_prefix(prefix) else { continue };
        for suffix in suffixes {
            let Some(stem) = rest.strip_suffix(suffix) else { continue };
            if stem.chars().count() >= MIN_NEGATED_STEM {
                out.push(Circumfix {
                    prefix: prefix.to_string(),
                    stem: stem.to_string(),
                    suffix: suffix.to_string(),
                });
            }
        }
    }
    out
}

/// The preferred negation split, if the token has one.
pub fn detect_negation_circumfix(token: &str) -> Option<Circumfix> {
    circumfix_splits(token, &NEGATION_PREFIXES, &NEGATION_SUFFIXES).into_iter().next()
}

fn edge_replacement(c: char, initial: bool) -> Option<Option<char>> {
    match (c, initial) {
        (HAMZA, _) => Some(None),
        ('أ' | 'إ' | 'آ', true) => Some(Some('ا')),
        ('أ', false) => Some(Some('ا')),
        ('ئ', false) => Some(Some('ي')),
        ('ؤ', false) => Some(Some('و')),
        _ => None,
    }
}

fn strip_glottal_edges(word: &str) -> String {
    let mut chars: Vec<char> = word.chars().collect();
    loop {
        let mut changed = false;
        if let Some(&first) = chars.first() {
            if let Some(replacement) = edge_replacement(first, true) {
                match replacement {
                    Some(r) => chars[0] = r,
                    None => {
                        chars.remove(0);
                    }
                }
                changed = true;
            }
        }
        if let Some(&last) = chars.last() {
            if let Some(replacement) = edge_replacement(last, false) {
                let n = chars.len() - 1;
                match replacement {
                    Some(r) => chars[n] = r,
                    None => {
                        chars.pop();
                    }
                }
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if chars.is_empty() {
        // a bare hamza stays as written
        return word.to_string();
    }
    chars.into_iter().collect()
}

/// Removes word-initial and word-final glottal stops unless the word is a
/// listed exception. Medial hamza is left alone.
pub fn apply_glottal_policy(arabic: &str, lex: &ExceptionLexicon) -> String {
    arabic
        .split(' ')
        .map(|word| {
            if word.is_empty() || lex.glottal_words.contains(word) {
                word.to_string()
            } else {
                strip_glottal_edges(word)
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{reconstruct_sentences, TokenRecord};

    #[test]
    fn prosody_fixtures() {
        assert_eq!(collapse_prosody("bniiiiin").normalized, "bnin");
        assert_eq!(collapse_prosody("kelb").normalized, "kelb");
        assert_eq!(collapse_prosody("aaabb").normalized, "abb");
        assert_eq!(collapse_prosody("sa77a").normalized, "sa77a");
        assert_eq!(collapse_prosody("sa777a").normalized, "sa7a");
        assert_eq!(collapse_prosody("?!!!").normalized, "?!!!");
    }

    #[test]
    fn restore_reproduces_original() {
        let report = collapse_prosody("bniiiiin");
        assert_eq!(report.collapsed_runs, vec![(2, 5)]);
        assert_eq!(report.restore(), "bniiiiin");
    }

    #[test]
    fn code_switch_detection() {
        let lex = ExceptionLexicon::seed();
        assert!(detect_code_switch("patee", &lex));
        assert!(detect_code_switch("Recetteeee", &lex));
        assert!(!detect_code_switch("merci", &lex));
        assert!(!detect_code_switch("kelb", &lex));
    }

    #[test]
    fn loanword_conflict() {
        let lex = ExceptionLexicon::seed();
        assert_eq!(
            lex.with_entry("merci", LexiconCategory::Codeswitch),
            Err(LexiconError::Conflict { word: "merci".into() })
        );
        let grown = lex.with_entry("tomobil", LexiconCategory::Loanword).unwrap();
        assert!(grown.is_loanword("tomobil"));
        assert!(!lex.is_loanword("tomobil"));
    }

    #[test]
    fn lexicon_text_round_trip() {
        let lex = ExceptionLexicon::seed();
        assert_eq!(ExceptionLexicon::parse(&lex.to_text()).unwrap(), lex);
        assert!(matches!(ExceptionLexicon::parse("word"), Err(LexiconError::Line { line: 1, .. })));
        assert!(ExceptionLexicon::parse("word\tother").is_err());
    }

    #[test]
    fn sentence_filter() {
        let rows = vec![
            TokenRecord::unannotated("x", "150101", 1, 1, "R7"),
            TokenRecord::unannotated("x", "150101", 1, 2, "patee"),
            TokenRecord::unannotated("x", "150101", 2, 1, "dieri"),
            TokenRecord::unannotated("x", "150101", 2, 2, "bniiiiin"),
        ];
        let sentences = reconstruct_sentences(&rows).unwrap();
        let (kept, removed) = filter_code_switch_sentences(sentences, &ExceptionLexicon::seed());
        assert_eq!(kept.len(), 1);
        assert_eq!(removed.len(), 1);
        assert_eq!(kept[0].key.par, 2);
    }

    #[test]
    fn negation_fixtures() {
        let c = detect_negation_circumfix("manajemnech").unwrap();
        assert_eq!((c.prefix.as_str(), c.stem.as_str(), c.suffix.as_str()), ("ma", "najemne", "ch"));
        assert_eq!(detect_negation_circumfix("min"), None);
        assert_eq!(detect_negation_circumfix("mach"), None);
        assert_eq!(detect_negation_circumfix("merci"), None);
    }

    #[test]
    fn glottal_fixtures() {
        let lex = ExceptionLexicon::seed();
        assert_eq!(apply_glottal_policy("أسئلة", &lex), "أسئلة");
        assert_eq!(apply_glottal_policy("سماء", &lex), "سما");
        assert_eq!(apply_glottal_policy("أكل", &lex), "اكل");
        assert_eq!(apply_glottal_policy("سئل", &lex), "سئل");
        assert_eq!(apply_glottal_policy("ما نجمناش", &lex), "ما نجمناش");
        assert_eq!(apply_glottal_policy("ء", &lex), "ء");
    }

    #[test]
    fn normalize_sets_flags() {
        let lex = ExceptionLexicon::seed();
        let r = normalize("MERCIIII", &lex);
        assert_eq!(r.normalized, "merci");
        assert!(r.flags.contains(&NormFlag::Loanword));
        assert!(normalize("manajemnech", &lex).flags.contains(&NormFlag::NegationCircumfix));
        assert!(normalize("patee", &lex).flags.contains(&NormFlag::CodeSwitch));
    }
}
