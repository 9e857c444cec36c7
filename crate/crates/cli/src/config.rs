//! Optional TOML configuration. Every key mirrors a command-line flag; a
//! flag given on the command line wins over the file.
//!
//! ```toml
//! seed = 42
//!
//! [paths]
//! corpus = "data/tarc.tsv"
//! model = "models/current.json"
//! store = "store"
//! mapping_table = "resources/code_system.tsv"
//! clitics = "resources/clitics.tsv"
//! lexicon = "resources/lexicon.tsv"
//!
//! [transducer]
//! order = 2
//! add_k = 0.1
//! beam_width = 16
//! lattice_weight = 0.5
//! ```
//!
//! Relative paths in the file are resolved against the file's directory.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use tarc_core::code_system::MappingTable;
use tarc_core::normalization::ExceptionLexicon;
use tarc_core::segmentation::CliticInventory;
use tarc_core::transliteration::Resources;
use tarc_core::TransducerConfig;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    #[serde(default)]
    pub paths: PathsSection,
    #[serde(default)]
    pub transducer: TransducerSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsSection {
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub mapping_table: Option<PathBuf>,
    pub clitics: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransducerSection {
    pub order: Option<usize>,
    pub add_k: Option<f64>,
    pub beam_width: Option<usize>,
    pub lattice_weight: Option<f64>,
    pub unknown_penalty: Option<f64>,
    pub max_expansions: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: FileConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let p = &mut config.paths;
        for slot in [&mut p.corpus, &mut p.model, &mut p.store, &mut p.mapping_table, &mut p.clitics, &mut p.lexicon] {
            if let Some(rel) = slot.as_ref().filter(|p| p.is_relative()) {
                *slot = Some(base.join(rel));
            }
        }
        Ok(config)
    }
}

/// Flags that override the file, as parsed from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub mapping_table: Option<PathBuf>,
    pub clitics: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub order: Option<usize>,
    pub add_k: Option<f64>,
    pub beam_width: Option<usize>,
    pub lattice_weight: Option<f64>,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub seed: u64,
    pub corpus: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub store: Option<PathBuf>,
    pub mapping_table: Option<PathBuf>,
    pub clitics: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub transducer: TransducerConfig,
}

impl CliConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self> {
        let mut transducer = TransducerConfig::default();
        let t = file.transducer;
        transducer.order = flags.order.or(t.order).unwrap_or(transducer.order);
        transducer.add_k = flags.add_k.or(t.add_k).unwrap_or(transducer.add_k);
        transducer.beam_width = flags.beam_width.or(t.beam_width).unwrap_or(transducer.beam_width);
        transducer.lattice_weight = flags.lattice_weight.or(t.lattice_weight).unwrap_or(transducer.lattice_weight);
        transducer.unknown_penalty = t.unknown_penalty.unwrap_or(transducer.unknown_penalty);
        transducer.max_expansions = t.max_expansions.unwrap_or(transducer.max_expansions);
        transducer.validate()?;
        let p = file.paths;
        Ok(Self {
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            corpus: flags.corpus.or(p.corpus),
            model: flags.model.or(p.model),
            store: flags.store.or(p.store),
            mapping_table: flags.mapping_table.or(p.mapping_table),
            clitics: flags.clitics.or(p.clitics),
            lexicon: flags.lexicon.or(p.lexicon),
            transducer,
        })
    }

    /// Bundled resources with any file overrides applied.
    pub fn resources(&self) -> Result<Resources> {
        let mut resources = Resources::bundled();
        let read = |p: &Path| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()));
        if let Some(p) = &self.mapping_table {
            resources.table = MappingTable::parse(&read(p)?)?;
        }
        if let Some(p) = &self.clitics {
            resources.clitics = CliticInventory::parse(&read(p)?)?;
        }
        if let Some(p) = &self.lexicon {
            resources.lexicon = ExceptionLexicon::parse(&read(p)?)?;
        }
        Ok(resources)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file: FileConfig = toml::from_str(
            "seed = 7\n[paths]\ncorpus = \"a.tsv\"\n[transducer]\norder = 3\nadd_k = 0.5\n",
        )
        .unwrap();
        let flags = Overrides { seed: Some(9), order: Some(1), ..Default::default() };
        let config = CliConfig::resolve(file, flags).unwrap();
        assert_eq!(config.seed, 9);
        assert_eq!(config.transducer.order, 1);
        assert_eq!(config.transducer.add_k, 0.5);
        assert_eq!(config.corpus, Some(PathBuf::from("a.tsv")));
    }

    #[test]
    fn defaults() {
        let config = CliConfig::resolve(FileConfig::default(), Overrides::default()).unwrap();
        assert_eq!(config.seed, DEFAULT_SEED);
        assert_eq!(config.transducer, TransducerConfig::default());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(toml::from_str::<FileConfig>("sede = 1").is_err());
        let file: FileConfig = toml::from_str("[transducer]\nlattice_weight = 2.0").unwrap();
        assert!(CliConfig::resolve(file, Overrides::default()).is_err());
    }

    #[test]
    fn relative_paths_follow_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("tarc.toml");
        std::fs::write(&path, "[paths]\nmodel = \"m.json\"\nstore = \"/abs/store\"\n").unwrap();
        let file = FileConfig::load(&path).unwrap();
        assert_eq!(file.paths.model, Some(dir.path().join("m.json")));
        assert_eq!(file.paths.store, Some(PathBuf::from("/abs/store")));
    }
}
