//! TOML experiment configuration.
//!
//! ```toml
//! embeddings = "embeddings.csv"        # optional
//!
//! [corpora]                           # language code -> manifest
//! tgl = "tgl/manifest.tsv"
//! bcl = "bcl/manifest.tsv"
//!
//! [profiles]
//! top_fraction = 0.25
//! policy = "training-only"            # or "full-corpus"
//! strip_entities = true
//!
//! [forest]                            # any ForestConfig field
//! num_trees = 100
//! seed = 1
//!
//! [orthography]
//! plain = ["eng"]                     # languages without the ng digraph
//!
//! [grid]
//! preset = "table3"                   # used when no [[grid.cells]] given
//! folds = 5
//! fold_seed = 1
//!
//! [[grid.comparisons]]
//! a = "setup=singular,features=trad-crossngo"
//! b = "setup=singular,features=emb"
//! kind = "paired"
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{load_corpus_with, LanguageCode, NormalizeOptions};
use crate::error::{Error, Result};
use crate::features::{load_embeddings, FeatureOptions, FeatureSet};
use crate::forest::ForestConfig;
use crate::ngram::DEFAULT_TOP_FRACTION;
use crate::par::Execution;
use crate::stats::TestKind;

use super::{run_matrix, table3_grid, CellSelector, ExperimentContext, ExperimentReport, ExperimentSpec, ProfilePolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub top_fraction: f64,
    pub policy: ProfilePolicy,
    pub strip_entities: bool,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            top_fraction: DEFAULT_TOP_FRACTION,
            policy: ProfilePolicy::default(),
            strip_entities: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellConfig {
    pub train: Vec<String>,
    pub test: String,
    /// Defaults to every feature set.
    #[serde(default)]
    pub features: Option<Vec<FeatureSet>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComparisonConfig {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub kind: TestKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub preset: Option<String>,
    pub folds: usize,
    pub fold_seed: u64,
    /// Restricts preset cells to these feature sets.
    pub feature_sets: Option<Vec<FeatureSet>>,
    pub cells: Vec<CellConfig>,
    pub comparisons: Vec<ComparisonConfig>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            preset: None,
            folds: 5,
            fold_seed: 1,
            feature_sets: None,
            cells: Vec::new(),
            comparisons: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrthographySection {
    pub plain: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub corpora: BTreeMap<String, PathBuf>,
    #[serde(default)]
    pub embeddings: Option<PathBuf>,
    #[serde(default)]
    pub profiles: ProfileConfig,
    #[serde(default)]
    pub forest: ForestConfig,
    #[serde(default)]
    pub orthography: OrthographySection,
    #[serde(default)]
    pub grid: GridConfig,
}

/// Corpora and settings ready to run.
#[derive(Debug, Clone)]
pub struct LoadedExperiment {
    pub context: ExperimentContext,
    pub specs: Vec<ExperimentSpec>,
    pub comparisons: Vec<(CellSelector, CellSelector, TestKind)>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses the file and makes its relative paths absolute.
    pub fn read(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let mut cfg = ExperimentConfig::from_toml(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        for p in cfg.corpora.values_mut() {
            *p = base.join(&*p);
        }
        if let Some(p) = cfg.embeddings.as_mut() {
            *p = base.join(&*p);
        }
        Ok(cfg)
    }

    pub fn specs(&self) -> Result<Vec<ExperimentSpec>> {
        let grid = &self.grid;
        let mut specs = Vec::new();
        match grid.preset.as_deref() {
            Some("table3") => specs.extend(table3_grid(grid.folds, grid.fold_seed, &self.forest)),
            None if grid.cells.is_empty() => specs.extend(table3_grid(grid.folds, grid.fold_seed, &self.forest)),
            None => {}
            Some(other) => return Err(Error::Config(format!("unknown grid preset `{other}`"))),
        }
        if let Some(sets) = &grid.feature_sets {
            specs.retain(|s| sets.contains(&s.feature_set));
        }
        for cell in &grid.cells {
            let train = cell
                .train
                .iter()
                .map(|s| LanguageCode::new(s))
                .collect::<Result<Vec<_>>>()?;
            let test = LanguageCode::new(&cell.test)?;
            let sets = cell.features.clone().unwrap_or_else(|| FeatureSet::ALL_SETS.to_vec());
            for set in sets {
                specs.push(ExperimentSpec {
                    train_languages: train.clone(),
                    test_language: test.clone(),
                    feature_set: set,
                    folds: grid.folds,
                    fold_seed: grid.fold_seed,
                    forest: self.forest.clone(),
                });
            }
        }
        for spec in &specs {
            spec.validate()?;
        }
        if specs.is_empty() {
            return Err(Error::Config("grid selects no cells".into()));
        }
        Ok(specs)
    }

    /// Loads corpora and embeddings. A corpus that fails to load is
    /// recorded as unavailable so only the cells using it fail.
    pub fn load(&self, exec: Execution) -> Result<LoadedExperiment> {
        let specs = self.specs()?;
        if !(self.profiles.top_fraction > 0.0 && self.profiles.top_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "profiles.top_fraction must lie in (0, 1], got {}",
                self.profiles.top_fraction
            )));
        }
        let comparisons = self
            .grid
            .comparisons
            .iter()
            .map(|c| Ok((c.a.parse()?, c.b.parse()?, c.kind)))
            .collect::<Result<Vec<_>>>()?;

        let opts = NormalizeOptions {
            strip_entities: self.profiles.strip_entities,
        };
        let mut context = ExperimentContext::new(Vec::new());
        for (lang, path) in &self.corpora {
            let code = LanguageCode::new(lang)?;
            match load_corpus_with(path, opts) {
                Ok(corpus) if corpus.language == code => {
                    context.corpora.insert(code, corpus);
                }
                Ok(corpus) => {
                    context.unavailable.insert(
                        code,
                        format!("manifest declares language {}", corpus.language),
                    );
                }
                Err(e) => {
                    context.unavailable.insert(code, e.to_string());
                }
            }
        }
        if let Some(path) = &self.embeddings {
            context.embeddings = Some(load_embeddings(path)?);
        }
        context.top_fraction = self.profiles.top_fraction;
        context.profile_policy = self.profiles.policy;
        let mut features = FeatureOptions {
            execution: exec,
            ..FeatureOptions::default()
        };
        if let Some(plain) = &self.orthography.plain {
            features.plain_orthography = plain.iter().map(|s| LanguageCode::new(s)).collect::<Result<_>>()?;
        }
        context.features = features;
        Ok(LoadedExperiment {
            context,
            specs,
            comparisons,
        })
    }
}

impl LoadedExperiment {
    /// Runs the grid, then every configured comparison. Comparisons that
    /// cannot be computed are listed in the report notes.
    pub fn run(&self) -> Result<ExperimentReport> {
        let mut report = run_matrix(&self.specs, &self.context)?;
        for (a, b, kind) in &self.comparisons {
            if let Err(e) = report.record_comparison(a, b, *kind) {
                report.notes.push(format!("comparison [{a}] vs [{b}] not computed: {e}"));
            }
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_to_full_grid() {
        let cfg = ExperimentConfig::from_toml("[corpora]\ntgl = \"x.tsv\"\n").unwrap();
        assert_eq!(cfg.specs().unwrap().len(), 96);
        assert_eq!(cfg.forest, ForestConfig::default());
        assert_eq!(cfg.profiles.top_fraction, 0.25);
    }

    #[test]
    fn explicit_cells_and_filters() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            [corpora]
            tgl = "x.tsv"
            [forest]
            num_trees = 10
            num_features = { fixed = 3 }
            [grid]
            folds = 3
            [[grid.cells]]
            train = ["bcl"]
            test = "tgl"
            features = ["trad", "trad-crossngo"]
            "#,
        )
        .unwrap();
        let specs = cfg.specs().unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].folds, 3);
        assert_eq!(specs[0].forest.num_trees, 10);

        let filtered = ExperimentConfig::from_toml(
            "[corpora]\n[grid]\npreset = \"table3\"\nfeature_sets = [\"trad\"]\n",
        )
        .unwrap();
        assert_eq!(filtered.specs().unwrap().len(), 24);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(ExperimentConfig::from_toml("[corpora]\n[grid]\nfoldz = 3\n").is_err());
        let bad = ExperimentConfig::from_toml("[corpora]\n[grid]\npreset = \"nope\"\n").unwrap();
        assert!(bad.specs().is_err());
    }
}
