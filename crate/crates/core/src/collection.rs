//! Thematic keyword collection over local text dumps and author metadata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AgeRange, Gender, TokenRecord};
use crate::normalization::latin_key;

pub const DEFAULT_CATEGORIES: &str = include_str!("../data/categories.tsv");
pub const DEFAULT_CITIES: &str = include_str!("../data/cities.tsv");

/// Oldest plausible age; anything above is discarded.
pub const MAX_AGE: i64 = 120;

#[derive(Debug, Error)]
pub enum CollectionError {
    #[error("category file line {line}: {reason}")]
    CategoryLine { line: usize, reason: String },
    #[error("city table line {line}: {reason}")]
    CityLine { line: usize, reason: String },
    #[error("raw text {origin}: {reason}")]
    RawText { origin: String, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub name: String,
    pub meanings: Vec<String>,
    pub keywords: Vec<String>,
}

fn split_list(cell: &str) -> Vec<String> {
    cell.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

pub fn parse_categories(text: &str) -> Result<Vec<Category>, CollectionError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: &str| CollectionError::CategoryLine { line: i + 1, reason: reason.to_string() };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(err("expected name, meanings and keywords separated by tabs"));
        }
        let name = cols[0].trim();
        if name.is_empty() {
            return Err(err("empty category name"));
        }
        let keywords = split_list(cols[2]);
        if keywords.is_empty() {
            return Err(err("a category needs at least one keyword"));
        }
        out.push(Category { name: name.to_string(), meanings: split_list(cols[1]), keywords });
    }
    Ok(out)
}

pub fn categories_to_text(categories: &[Category]) -> String {
    let mut out = String::new();
    for c in categories {
        let _ = writeln!(out, "{}\t{}\t{}", c.name, c.meanings.join(","), c.keywords.join(","));
    }
    out
}

pub fn default_categories() -> Vec<Category> {
    parse_categories(DEFAULT_CATEGORIES).expect("bundled categories are valid")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub gender: Option<String>,
    /// Either an age or a four-digit birth year.
    pub birth_or_age: Option<String>,
    pub city: Option<String>,
}

/// One collected document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawText {
    pub source_code: String,
    /// Publication date as `YYMMDD`.
    pub date: String,
    pub body: String,
    pub author_profile: AuthorProfile,
}

/// Parses a text dump: `key: value` header lines, a blank line, the body.
///
/// Known keys are `source`, `date`, `gender`, `age` (or `birth`) and `city`;
/// unknown keys are ignored.
pub fn parse_raw_text(dump: &str, origin: &str) -> Result<RawText, CollectionError> {
    let err = |reason: &str| CollectionError::RawText { origin: origin.to_string(), reason: reason.to_string() };
    let (header, body) = dump.split_once("\n\n").ok_or_else(|| err("missing blank line after header"))?;
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    for line in header.lines() {
        let (key, value) = line.split_once(':').ok_or_else(|| err("header lines must be `key: value`"))?;
        let value = value.trim();
        if !value.is_empty() && value != "-" {
            fields.insert(key.trim().to_lowercase(), value.to_string());
        }
    }
    let body = body.trim();
    if body.is_empty() {
        return Err(err("empty body"));
    }
    let source_code = fields.remove("source").ok_or_else(|| err("missing `source`"))?;
    let date = fields.remove("date").ok_or_else(|| err("missing `date`"))?;
    let birth_or_age = fields.remove("age").or_else(|| fields.remove("birth"));
    Ok(RawText {
        source_code,
        date,
        body: body.to_string(),
        author_profile: AuthorProfile { gender: fields.remove("gender"), birth_or_age, city: fields.remove("city") },
    })
}

/// Source of raw documents. Crawling is out of scope; implementations read
/// local dumps.
pub trait TextFetcher {
    fn fetch(&self) -> Result<Vec<RawText>, CollectionError>;
}

/// Reads every `*.txt` file of a directory, in file-name order.
#[derive(Debug, Clone)]
pub struct DirectoryFetcher {
    pub dir: PathBuf,
}

impl DirectoryFetcher {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        Self { dir: dir.as_ref().to_path_buf() }
    }
}

impl TextFetcher for DirectoryFetcher {
    fn fetch(&self) -> Result<Vec<RawText>, CollectionError> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        paths.sort();
        paths
            .iter()
            .map(|p| parse_raw_text(&std::fs::read_to_string(p)?, &p.display().to_string()))
            .collect()
    }
}

/// Word tokens of a body: maximal runs of letters and digits.
pub fn words(body: &str) -> impl Iterator<Item = &str> {
    body.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryMatch {
    pub category: String,
    /// Keywords found, in category order.
    pub keywords: Vec<String>,
}

/// Every category with at least one keyword occurring as a whole word.
/// Case and prosodic letter repetition are ignored on both sides.
pub fn match_categories(text: &RawText, categories: &[Category]) -> Vec<CategoryMatch> {
    let present: BTreeSet<String> = words(&text.body).map(latin_key).collect();
    categories
        .iter()
        .filter_map(|c| {
            let mut seen = BTreeSet::new();
            let keywords: Vec<String> = c
                .keywords
                .iter()
                .filter(|k| present.contains(&latin_key(k)) && seen.insert(latin_key(k)))
                .cloned()
                .collect();
            (!keywords.is_empty()).then(|| CategoryMatch { category: c.name.clone(), keywords })
        })
        .collect()
}

/// Lowercase city name to corpus variety code.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CityTable {
    codes: BTreeMap<String, String>,
}

impl Default for CityTable {
    fn default() -> Self {
        Self::parse(DEFAULT_CITIES).expect("bundled city table is valid")
    }
}

impl CityTable {
    pub fn parse(text: &str) -> Result<Self, CollectionError> {
        let mut codes = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((city, code)) = line.split_once('\t') else {
                return Err(CollectionError::CityLine { line: i + 1, reason: "expected city<TAB>code".into() });
            };
            if city.trim().is_empty() || code.trim().is_empty() {
                return Err(CollectionError::CityLine { line: i + 1, reason: "empty field".into() });
            }
            codes.insert(city.trim().to_lowercase(), code.trim().to_string());
        }
        Ok(Self { codes })
    }

    pub fn code(&self, city: &str) -> Option<&str> {
        self.codes.get(&city.trim().to_lowercase()).map(String::as_str)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub gen: Option<Gender>,
    pub age: Option<AgeRange>,
    pub var: Option<String>,
}

fn parse_gender(raw: &str) -> Option<Gender> {
    match raw.trim().to_lowercase().as_str() {
        "m" | "male" | "man" | "homme" | "h" => Some(Gender::M),
        "f" | "female" | "woman" | "femme" => Some(Gender::F),
        _ => None,
    }
}

/// Age in years from an age or a birth year. A birth year needs the
/// reference year of the text.
pub fn resolve_age(raw: &str, reference_year: Option<i64>) -> Option<i64> {
    let raw = raw.trim();
    let value: i64 = raw.parse().ok()?;
    if raw.trim_start_matches('-').len() == 4 {
        return reference_year.map(|y| y - value);
    }
    Some(value)
}

/// Year of a `YYMMDD` date, taken to be in the 2000s.
pub fn date_year(date: &str) -> Option<i64> {
    if date.len() == 6 && date.bytes().all(|b| b.is_ascii_digit()) {
        date[..2].parse::<i64>().ok().map(|yy| 2000 + yy)
    } else {
        None
    }
}

/// Maps author profile fields to corpus metadata. Unknown or implausible
/// values become missing.
pub fn extract_metadata(profile: &AuthorProfile, reference_year: Option<i64>, cities: &CityTable) -> Metadata {
    let gen = profile.gender.as_deref().and_then(parse_gender);
    let age = profile.birth_or_age.as_deref().and_then(|raw| {
        let years = resolve_age(raw, reference_year)?;
        if !(0..=MAX_AGE).contains(&years) {
            log::warn!("discarding implausible age {years} (from {raw:?})");
            return None;
        }
        AgeRange::bucket(years as u32)
    });
    let var = profile.city.as_deref().and_then(|c| cities.code(c)).map(str::to_string);
    Metadata { gen, age, var }
}

/// Turns a document into unannotated corpus rows: one paragraph per
/// non-empty body line, one row per word.
pub fn ingest_raw(text: &RawText, cities: &CityTable) -> Vec<TokenRecord> {
    let meta = extract_metadata(&text.author_profile, date_year(&text.date), cities);
    let mut out = Vec::new();
    let lines = text.body.lines().filter(|l| words(l).next().is_some());
    for (p, line) in lines.enumerate() {
        for (w, word) in words(line).enumerate() {
            let mut record = TokenRecord::unannotated(&text.source_code, &text.date, p as u32 + 1, w as u32 + 1, word);
            if let Some(var) = &meta.var {
                record.var = var.clone();
            }
            record.age = meta.age;
            record.gen = meta.gen;
            out.push(record);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn text(body: &str) -> RawText {
        RawText {
            source_code: "3fE".into(),
            date: "150902".into(),
            body: body.into(),
            author_profile: AuthorProfile::default(),
        }
    }

    #[test]
    fn family_has_eleven_keywords() {
        let cats = default_categories();
        assert_eq!(cats.len(), 5);
        assert_eq!(cats[0].name, "Family");
        assert_eq!(cats[0].keywords.len(), 11);
        assert_eq!(parse_categories(&categories_to_text(&cats)).unwrap(), cats);
    }

    #[test]
    fn sardouk_is_an_animal() {
        let m = match_categories(&text("el SARDOUUUK yo93ed"), &default_categories());
        assert_eq!(m, vec![CategoryMatch { category: "Animals".into(), keywords: vec!["sardouk".into()] }]);
        assert!(match_categories(&text("kifech"), &default_categories()).is_empty());
        // whole words only
        assert!(match_categories(&text("kelbi"), &default_categories()).is_empty());
    }

    #[test]
    fn metadata() {
        let cities = CityTable::default();
        let p = AuthorProfile { gender: Some("M".into()), birth_or_age: Some("30".into()), city: Some("Bizerte".into()) };
        let m = extract_metadata(&p, None, &cities);
        assert_eq!(m, Metadata { gen: Some(Gender::M), age: Some(AgeRange::From25To35), var: Some("Bnz".into()) });
        let p = AuthorProfile { gender: Some("?".into()), birth_or_age: Some("1990".into()), city: Some("Atlantis".into()) };
        let m = extract_metadata(&p, Some(2015), &cities);
        assert_eq!(m, Metadata { gen: None, age: Some(AgeRange::From25To35), var: None });
        let p = AuthorProfile { birth_or_age: Some("130".into()), ..Default::default() };
        assert_eq!(extract_metadata(&p, None, &cities).age, None);
        let p = AuthorProfile { birth_or_age: Some("-4".into()), ..Default::default() };
        assert_eq!(extract_metadata(&p, None, &cities).age, None);
    }

    #[test]
    fn raw_dump() {
        let dump = "source: 3fE\ndate: 150902\ngender: F\ncity: -\n\nkifech tchoufou\n\nl3icha fil ghorba?\n";
        let raw = parse_raw_text(dump, "x").unwrap();
        assert_eq!(raw.author_profile.city, None);
        let records = ingest_raw(&raw, &CityTable::default());
        let view: Vec<_> = records.iter().map(|r| (r.par, r.w.to_string(), r.arabish.as_str())).collect();
        assert_eq!(view[0], (1, "1".into(), "kifech"));
        assert_eq!(view[4], (2, "3".into(), "ghorba"));
        assert!(records.iter().all(|r| r.gen == Some(Gender::F) && r.var == "-"));
        assert!(parse_raw_text("source: a\ndate: 150902\n\n   ", "x").is_err());
        assert!(parse_raw_text("no header", "x").is_err());
    }
}
