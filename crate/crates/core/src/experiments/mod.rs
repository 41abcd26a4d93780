//! Cross-lingual experiment grid: train on one, two or three languages,
//! test on each target language, for every feature set.
//!
//! Evaluation protocol per cell:
//!
//! * test language among the training languages: stratified k-fold on the
//!   test-language corpus, with each training fold extended by the full
//!   corpora of the other training languages;
//! * otherwise: train once on the union of the training corpora and test
//!   on the whole test corpus.

mod config;
mod report;

pub use config::{CellConfig, ComparisonConfig, ExperimentConfig, GridConfig, LoadedExperiment, OrthographySection, ProfileConfig};
pub use report::{CellRecord, CellSelector, CellStatus, Comparison, ExperimentReport, ReportMetadata};

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, GradeLabel, LanguageCode};
use crate::error::{Error, Result};
use crate::features::{
    assemble_documents, EmbeddingTable, FeatureGroup, FeatureOptions, FeatureSet, ReferenceProfiles,
    REFERENCE_LANGUAGES,
};
use crate::forest::{self, stratified_kfold, EvalResult, ForestConfig};
use crate::ngram::DEFAULT_TOP_FRACTION;
use crate::par::{self, Execution};

/// Where CrossNGO reference lists come from inside a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfilePolicy {
    /// Every reference language's list is built without the documents
    /// being evaluated.
    #[default]
    TrainingOnly,
    /// Lists are built once from the complete corpora.
    FullCorpus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setup {
    Singular,
    Pairwise,
    Full,
}

impl Setup {
    pub fn of(train_languages: usize) -> Setup {
        match train_languages {
            0 | 1 => Setup::Singular,
            2 => Setup::Pairwise,
            _ => Setup::Full,
        }
    }
}

impl fmt::Display for Setup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setup::Singular => "singular",
            Setup::Pairwise => "pairwise",
            Setup::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub train_languages: Vec<LanguageCode>,
    pub test_language: LanguageCode,
    pub feature_set: FeatureSet,
    pub folds: usize,
    pub fold_seed: u64,
    pub forest: ForestConfig,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.train_languages.is_empty() {
            return Err(Error::InvalidParameter("no training language".into()));
        }
        let unique: HashSet<_> = self.train_languages.iter().collect();
        if unique.len() != self.train_languages.len() {
            return Err(Error::InvalidParameter("training languages repeat".into()));
        }
        if self.folds < 2 {
            return Err(Error::InvalidParameter(format!("folds must be at least 2, got {}", self.folds)));
        }
        self.forest.validate()
    }

    pub fn setup(&self) -> Setup {
        Setup::of(self.train_languages.len())
    }

    /// Row label in the report table, e.g. `TGL+BCL` or `ALL`.
    pub fn train_label(&self) -> String {
        train_label(&self.train_languages)
    }

    pub fn is_cross_validated(&self) -> bool {
        self.train_languages.contains(&self.test_language)
    }
}

pub(crate) fn train_label(langs: &[LanguageCode]) -> String {
    let is_all = langs.len() == REFERENCE_LANGUAGES.len()
        && REFERENCE_LANGUAGES.iter().all(|r| langs.iter().any(|l| l.as_str() == *r));
    if is_all {
        return "ALL".into();
    }
    langs
        .iter()
        .map(|l| l.as_str().to_uppercase())
        .collect::<Vec<_>>()
        .join("+")
}

/// Train rows of the cross-lingual results table, top to bottom.
pub fn table3_train_sets() -> Vec<Vec<&'static str>> {
    vec![
        vec!["tgl"],
        vec!["bcl"],
        vec!["ceb"],
        vec!["eng"],
        vec!["tgl", "bcl"],
        vec!["bcl", "ceb"],
        vec!["ceb", "tgl"],
        vec!["tgl", "bcl", "ceb"],
    ]
}

/// Every cell of the results table: 8 training rows x 3 test languages x
/// 4 feature sets.
pub fn table3_grid(folds: usize, fold_seed: u64, forest: &ForestConfig) -> Vec<ExperimentSpec> {
    let code = |s: &str| LanguageCode::new(s).expect("valid code");
    let mut specs = Vec::new();
    for train in table3_train_sets() {
        for test in REFERENCE_LANGUAGES {
            for set in FeatureSet::ALL_SETS {
                specs.push(ExperimentSpec {
                    train_languages: train.iter().map(|s| code(s)).collect(),
                    test_language: code(test),
                    feature_set: set,
                    folds,
                    fold_seed,
                    forest: forest.clone(),
                });
            }
        }
    }
    specs
}

/// Shared inputs and settings for running cells.
#[derive(Debug, Clone)]
pub struct ExperimentContext {
    pub corpora: BTreeMap<LanguageCode, Corpus>,
    /// Corpora that failed to load, with the reason.
    pub unavailable: BTreeMap<LanguageCode, String>,
    pub embeddings: Option<EmbeddingTable>,
    pub top_fraction: f64,
    pub profile_policy: ProfilePolicy,
    pub features: FeatureOptions,
}

impl ExperimentContext {
    pub fn new(corpora: Vec<Corpus>) -> Self {
        ExperimentContext {
            corpora: corpora.into_iter().map(|c| (c.language.clone(), c)).collect(),
            unavailable: BTreeMap::new(),
            embeddings: None,
            top_fraction: DEFAULT_TOP_FRACTION,
            profile_policy: ProfilePolicy::default(),
            features: FeatureOptions::default(),
        }
    }

    pub fn execution(&self) -> Execution {
        self.features.execution
    }

    fn corpus(&self, lang: &LanguageCode) -> Result<&Corpus> {
        self.corpora.get(lang).ok_or_else(|| match self.unavailable.get(lang) {
            Some(reason) => Error::Config(format!("corpus {lang} unavailable: {reason}")),
            None => Error::MissingLanguage(lang.to_string()),
        })
    }

    /// Builds the six reference lists, leaving out `held_out` documents
    /// when the policy asks for it. A language whose documents are all held
    /// out falls back to its full corpus and adds a note.
    fn reference_profiles(
        &self,
        held_out: &HashSet<(&LanguageCode, &str)>,
        notes: &mut Vec<String>,
    ) -> Result<ReferenceProfiles> {
        let mut docs: BTreeMap<LanguageCode, Vec<&Document>> = BTreeMap::new();
        for lang in REFERENCE_LANGUAGES {
            let code = LanguageCode::new(lang)?;
            let corpus = self.corpus(&code)?;
            let all: Vec<&Document> = corpus.documents.iter().collect();
            let kept: Vec<&Document> = match self.profile_policy {
                ProfilePolicy::FullCorpus => all.clone(),
                ProfilePolicy::TrainingOnly => all
                    .iter()
                    .copied()
                    .filter(|d| !held_out.contains(&(&d.language, d.id.as_str())))
                    .collect(),
            };
            if kept.is_empty() {
                let note = format!("{lang} reference list built from the full corpus (all documents held out)");
                if !notes.contains(&note) {
                    notes.push(note);
                }
                docs.insert(code, all);
            } else {
                docs.insert(code, kept);
            }
        }
        ReferenceProfiles::build(&docs, self.top_fraction, self.execution())
    }
}

/// Outcome of one cell plus protocol notes.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub result: EvalResult,
    pub notes: Vec<String>,
}

fn train_and_predict(
    ctx: &ExperimentContext,
    spec: &ExperimentSpec,
    train_docs: &[&Document],
    eval_docs: &[&Document],
    notes: &mut Vec<String>,
) -> Result<Vec<(String, GradeLabel, GradeLabel)>> {
    let train_keys: HashSet<(&LanguageCode, &str)> =
        train_docs.iter().map(|d| (&d.language, d.id.as_str())).collect();
    if let Some(d) = eval_docs.iter().find(|d| train_keys.contains(&(&d.language, d.id.as_str()))) {
        return Err(Error::Leakage(format!("{}/{}", d.language, d.id)));
    }
    let held_out: HashSet<(&LanguageCode, &str)> =
        eval_docs.iter().map(|d| (&d.language, d.id.as_str())).collect();
    let profiles = if spec.feature_set.uses(FeatureGroup::CrossNgo) {
        Some(ctx.reference_profiles(&held_out, notes)?)
    } else {
        None
    };
    let embeddings = ctx.embeddings.as_ref();
    let train = assemble_documents(train_docs, spec.feature_set, profiles.as_ref(), embeddings, &ctx.features)?;
    let test = assemble_documents(eval_docs, spec.feature_set, profiles.as_ref(), embeddings, &ctx.features)?;
    let model = forest::train_with(&train, &spec.forest, ctx.execution())?;
    let predictions = model.predict_with(&test, ctx.execution())?;
    Ok(test
        .rows
        .iter()
        .zip(predictions)
        .map(|(row, p)| (row.doc_id.clone(), row.label, p.label))
        .collect())
}

/// Evaluates one cell of the grid.
pub fn run_cell(spec: &ExperimentSpec, ctx: &ExperimentContext) -> Result<CellOutcome> {
    spec.validate()?;
    if spec.feature_set.uses(FeatureGroup::Emb) && ctx.embeddings.is_none() {
        return Err(Error::Embedding("no embedding table loaded".into()));
    }
    let test_corpus = ctx.corpus(&spec.test_language)?;
    let mut others: Vec<&Document> = Vec::new();
    for lang in spec.train_languages.iter().filter(|l| **l != spec.test_language) {
        others.extend(&ctx.corpus(lang)?.documents);
    }
    let mut notes = Vec::new();

    if !spec.is_cross_validated() {
        let eval_docs: Vec<&Document> = test_corpus.documents.iter().collect();
        let predictions = train_and_predict(ctx, spec, &others, &eval_docs, &mut notes)?;
        let (gold, predicted): (Vec<_>, Vec<_>) = predictions.iter().map(|(_, g, p)| (*g, *p)).unzip();
        return Ok(CellOutcome {
            result: EvalResult::from_predictions(&gold, &predicted)?,
            notes,
        });
    }

    let docs = &test_corpus.documents;
    let ids: Vec<&str> = docs.iter().map(|d| d.id.as_str()).collect();
    let labels: Vec<GradeLabel> = docs.iter().map(|d| d.grade).collect();
    let folds = stratified_kfold(&ids, &labels, spec.folds, spec.fold_seed)?;

    let mut gold = Vec::with_capacity(docs.len());
    let mut predicted = Vec::with_capacity(docs.len());
    let mut fold_accuracies = Vec::with_capacity(spec.folds);
    for fold in 0..spec.folds {
        let mut eval_docs = Vec::new();
        let mut train_docs = Vec::new();
        for (doc, &f) in docs.iter().zip(&folds) {
            if f == fold {
                eval_docs.push(doc);
            } else {
                train_docs.push(doc);
            }
        }
        train_docs.extend(others.iter().copied());
        let predictions = train_and_predict(ctx, spec, &train_docs, &eval_docs, &mut notes)?;
        let correct = predictions.iter().filter(|(_, g, p)| g == p).count();
        fold_accuracies.push(correct as f64 / predictions.len() as f64);
        for (_, g, p) in predictions {
            gold.push(g);
            predicted.push(p);
        }
    }
    let mut result = EvalResult::from_predictions(&gold, &predicted)?;
    result.fold_assignments = ids.iter().zip(&folds).map(|(id, &f)| (id.to_string(), f)).collect();
    result.fold_accuracies = fold_accuracies;
    Ok(CellOutcome { result, notes })
}

/// Runs every spec. A failing cell is recorded and does not stop the rest;
/// cells needing embeddings are skipped when none are loaded.
pub fn run_matrix(specs: &[ExperimentSpec], ctx: &ExperimentContext) -> Result<ExperimentReport> {
    if specs.is_empty() {
        return Err(Error::InvalidParameter("experiment grid is empty".into()));
    }
    let cells = par::map(ctx.execution(), specs, |spec| {
        let status = if spec.feature_set.uses(FeatureGroup::Emb) && ctx.embeddings.is_none() {
            CellStatus::Skipped {
                reason: "no embedding table loaded".into(),
            }
        } else {
            match run_cell(spec, ctx) {
                Ok(outcome) => CellStatus::Completed {
                    result: outcome.result,
                    notes: outcome.notes,
                },
                Err(e) => CellStatus::Failed { error: e.to_string() },
            }
        };
        CellRecord {
            train_languages: spec.train_languages.clone(),
            test_language: spec.test_language.clone(),
            feature_set: spec.feature_set,
            setup: spec.setup(),
            status,
        }
    });

    let first = &specs[0];
    Ok(ExperimentReport {
        metadata: ReportMetadata {
            forest_seed: first.forest.seed,
            fold_seed: first.fold_seed,
            folds: first.folds,
            num_trees: first.forest.num_trees,
            top_fraction: ctx.top_fraction,
            profile_policy: ctx.profile_policy,
            embeddings_loaded: ctx.embeddings.is_some(),
            generated_unix: None,
        },
        cells,
        significance: Vec::new(),
        notes: Vec::new(),
    })
}
