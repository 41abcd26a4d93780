//! Random forest classifier with bagging and random feature subsets.
//!
//! Defaults follow the usual toolkit settings: 100 trees, bootstrap
//! samples as large as the training set, unlimited depth,
//! `int(log2(#predictors) + 1)` candidate features per split, seed 1.
//! Tree `i` draws everything from a [`SplitMix64`] seeded with `seed + i`,
//! so training on many threads yields the same forest as training on one.

mod eval;
mod kfold;
mod rng;
mod tree;

pub use eval::{cross_validate, cross_validate_with, evaluate, ConfusionMatrix, EvalResult};
pub use kfold::{stratified_kfold, FoldAssignment};
pub use rng::SplitMix64;
pub use tree::DecisionTree;

use serde::{Deserialize, Serialize};

use crate::corpus::GradeLabel;
use crate::error::{Error, Result};
use crate::features::{FeatureMatrix, FeatureSchema};
use crate::par::{self, Execution};
use tree::TreeBuilder;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// How many features each split considers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureRule {
    /// `int(log2(p) + 1)`
    Log2,
    /// `int(ln(p) + 1)`
    Ln,
    Fixed(usize),
}

impl FeatureRule {
    pub fn resolve(self, predictors: usize) -> usize {
        let k = match self {
            FeatureRule::Log2 => ((predictors as f64).log2() + 1.0) as usize,
            FeatureRule::Ln => ((predictors as f64).ln() + 1.0) as usize,
            FeatureRule::Fixed(k) => k,
        };
        k.clamp(1, predictors.max(1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Entropy,
    Gini,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestConfig {
    pub num_trees: usize,
    pub bag_fraction: f64,
    pub max_depth: Option<usize>,
    pub num_features: FeatureRule,
    pub seed: u64,
    pub min_samples_leaf: usize,
    pub criterion: Criterion,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            num_trees: 100,
            bag_fraction: 1.0,
            max_depth: None,
            num_features: FeatureRule::Log2,
            seed: 1,
            min_samples_leaf: 1,
            criterion: Criterion::Entropy,
        }
    }
}

impl ForestConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_trees == 0 {
            return Err(Error::InvalidParameter("num_trees must be at least 1".into()));
        }
        if !(self.bag_fraction > 0.0 && self.bag_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "bag_fraction must lie in (0, 1], got {}",
                self.bag_fraction
            )));
        }
        if self.num_features == FeatureRule::Fixed(0) {
            return Err(Error::InvalidParameter("num_features must be positive".into()));
        }
        Ok(())
    }
}

/// Predicted grade with class probabilities aligned to
/// [`ForestModel::class_labels`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: GradeLabel,
    pub probabilities: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: u32,
    pub config: ForestConfig,
    /// Classes seen in training, ascending.
    pub class_labels: Vec<GradeLabel>,
    pub schema_fingerprint: String,
    pub num_features: usize,
    pub features_per_split: usize,
    pub per_tree_seed: Vec<u64>,
    pub trees: Vec<DecisionTree>,
}

pub fn train(matrix: &FeatureMatrix, cfg: &ForestConfig) -> Result<ForestModel> {
    train_with(matrix, cfg, Execution::default())
}

pub fn train_with(matrix: &FeatureMatrix, cfg: &ForestConfig, exec: Execution) -> Result<ForestModel> {
    let rows: Vec<&[f64]> = matrix.rows.iter().map(|r| r.values.as_slice()).collect();
    fit(&rows, &matrix.labels(), &matrix.schema, cfg, exec)
}

/// Trains on raw rows. All rows must have `schema.len()` finite values.
pub fn fit(
    rows: &[&[f64]],
    labels: &[GradeLabel],
    schema: &FeatureSchema,
    cfg: &ForestConfig,
    exec: Execution,
) -> Result<ForestModel> {
    cfg.validate()?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if rows.len() != labels.len() {
        return Err(Error::LengthMismatch(rows.len(), labels.len()));
    }
    let num_features = schema.len();
    if num_features == 0 {
        return Err(Error::InvalidParameter("no feature columns".into()));
    }
    if let Some(row) = rows.iter().find(|r| r.len() != num_features) {
        return Err(Error::SchemaMismatch {
            expected: format!("{num_features} values per row"),
            found: format!("{} values", row.len()),
        });
    }
    if rows.iter().any(|r| r.iter().any(|v| !v.is_finite())) {
        return Err(Error::InvalidParameter("feature values must be finite".into()));
    }

    let mut class_labels: Vec<GradeLabel> = labels.to_vec();
    class_labels.sort();
    class_labels.dedup();
    if class_labels.len() < 2 {
        return Err(Error::SingleClass);
    }
    let classes: Vec<usize> = labels
        .iter()
        .map(|l| class_labels.binary_search(l).expect("label collected above"))
        .collect();

    let features_per_split = cfg.num_features.resolve(num_features);
    let bag_size = ((cfg.bag_fraction * rows.len() as f64).round() as usize).max(1);
    let per_tree_seed: Vec<u64> = (0..cfg.num_trees as u64)
        .map(|i| cfg.seed.wrapping_add(i))
        .collect();
    let builder = TreeBuilder {
        rows,
        classes: &classes,
        num_classes: class_labels.len(),
        num_features,
        features_per_split,
        cfg,
    };
    let trees = par::map(exec, &per_tree_seed, |&seed| {
        let mut rng = SplitMix64::new(seed);
        let sample: Vec<usize> = (0..bag_size).map(|_| rng.below(rows.len())).collect();
        builder.grow(sample, &mut rng)
    });

    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION,
        config: cfg.clone(),
        class_labels,
        schema_fingerprint: schema.fingerprint(),
        num_features,
        features_per_split,
        per_tree_seed,
        trees,
    })
}

impl ForestModel {
    pub fn check_schema(&self, schema: &FeatureSchema) -> Result<()> {
        let found = schema.fingerprint();
        if found != self.schema_fingerprint {
            return Err(Error::SchemaMismatch {
                expected: self.schema_fingerprint.clone(),
                found,
            });
        }
        Ok(())
    }

    /// Averages leaf distributions over trees. Ties go to the lowest grade.
    pub fn predict_row(&self, row: &[f64]) -> Result<Prediction> {
        if row.len() != self.num_features {
            return Err(Error::SchemaMismatch {
                expected: format!("{} values per row", self.num_features),
                found: format!("{} values", row.len()),
            });
        }
        let mut probabilities = vec![0.0; self.class_labels.len()];
        for tree in &self.trees {
            for (acc, p) in probabilities.iter_mut().zip(tree.leaf_distribution(row)) {
                *acc += p;
            }
        }
        let scale = self.trees.len() as f64;
        probabilities.iter_mut().for_each(|p| *p /= scale);
        let mut best = 0;
        for (i, &p) in probabilities.iter().enumerate() {
            if p > probabilities[best] {
                best = i;
            }
        }
        Ok(Prediction {
            label: self.class_labels[best],
            probabilities,
        })
    }

    pub fn predict(&self, matrix: &FeatureMatrix) -> Result<Vec<Prediction>> {
        self.predict_with(matrix, Execution::default())
    }

    pub fn predict_with(&self, matrix: &FeatureMatrix, exec: Execution) -> Result<Vec<Prediction>> {
        self.check_schema(&matrix.schema)?;
        par::map(exec, &matrix.rows, |row| self.predict_row(&row.values))
            .into_iter()
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Version {
            format_version: u32,
        }
        let version: Version = serde_json::from_str(text)?;
        if version.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion(version.format_version));
        }
        let model: ForestModel = serde_json::from_str(text)?;
        let classes = model.class_labels.len();
        if model.trees.len() != model.per_tree_seed.len()
            || model.trees.is_empty()
            || !model.trees.iter().all(|t| t.is_well_formed(model.num_features, classes))
        {
            return Err(Error::InvalidParameter("model file has malformed trees".into()));
        }
        Ok(model)
    }
}
