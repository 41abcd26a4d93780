use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::corpus::GradeLabel;
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::par::Execution;

use super::{stratified_kfold, train_with, ForestConfig, ForestModel};

/// Counts over grades 1..=3; rows are gold labels, columns predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<GradeLabel>,
    pub counts: Vec<Vec<usize>>,
}

impl Default for ConfusionMatrix {
    fn default() -> Self {
        let size = GradeLabel::ALL.len();
        ConfusionMatrix {
            labels: GradeLabel::ALL.to_vec(),
            counts: vec![vec![0; size]; size],
        }
    }
}

impl ConfusionMatrix {
    pub fn record(&mut self, gold: GradeLabel, predicted: GradeLabel) {
        self.counts[gold.index()][predicted.index()] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            total => self.correct() as f64 / total as f64,
        }
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// `self - other`, cell by cell.
    pub fn delta(&self, other: &ConfusionMatrix) -> Vec<Vec<i64>> {
        self.counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x as i64 - y as i64).collect())
            .collect()
    }

    pub fn to_table(&self) -> String {
        let mut out = String::from("gold\\pred");
        for l in &self.labels {
            let _ = write!(out, "\t{l}");
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.counts) {
            let _ = write!(out, "{l}");
            for c in row {
                let _ = write!(out, "\t{c}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub accuracy: f64,
    pub confusion: ConfusionMatrix,
    /// Fold index of each evaluated document; empty for a single split.
    pub fold_assignments: BTreeMap<String, usize>,
    pub fold_accuracies: Vec<f64>,
}

impl EvalResult {
    pub fn from_predictions(gold: &[GradeLabel], predicted: &[GradeLabel]) -> Result<Self> {
        if gold.len() != predicted.len() {
            return Err(Error::LengthMismatch(gold.len(), predicted.len()));
        }
        if gold.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut confusion = ConfusionMatrix::default();
        for (&g, &p) in gold.iter().zip(predicted) {
            confusion.record(g, p);
        }
        Ok(EvalResult {
            accuracy: confusion.accuracy(),
            confusion,
            fold_assignments: BTreeMap::new(),
            fold_accuracies: Vec::new(),
        })
    }

    pub fn to_text(&self) -> String {
        format!(
            "accuracy\t{:.3}\ninstances\t{}\n{}",
            self.accuracy * 100.0,
            self.confusion.total(),
            self.confusion.to_table()
        )
    }
}

/// Scores a trained model on a held-out matrix.
pub fn evaluate(model: &ForestModel, test: &FeatureMatrix, exec: Execution) -> Result<EvalResult> {
    if test.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predicted: Vec<GradeLabel> = model.predict_with(test, exec)?.into_iter().map(|p| p.label).collect();
    EvalResult::from_predictions(&test.labels(), &predicted)
}

pub fn cross_validate(matrix: &FeatureMatrix, cfg: &ForestConfig, k: usize, seed: u64) -> Result<EvalResult> {
    cross_validate_with(matrix, cfg, k, seed, Execution::default())
}

/// Stratified k-fold cross-validation with predictions pooled into one
/// confusion matrix.
pub fn cross_validate_with(
    matrix: &FeatureMatrix,
    cfg: &ForestConfig,
    k: usize,
    seed: u64,
    exec: Execution,
) -> Result<EvalResult> {
    let labels = matrix.labels();
    let folds = stratified_kfold(&matrix.ids(), &labels, k, seed)?;
    let mut predicted = vec![labels[0]; labels.len()];
    let mut fold_accuracies = Vec::with_capacity(k);
    for fold in 0..k {
        let (test_idx, train_idx): (Vec<usize>, Vec<usize>) = (0..matrix.len()).partition(|&i| folds[i] == fold);
        let model = train_with(&matrix.select(&train_idx), cfg, exec)?;
        let test = matrix.select(&test_idx);
        let preds = model.predict_with(&test, exec)?;
        let mut correct = 0;
        for (&i, p) in test_idx.iter().zip(&preds) {
            predicted[i] = p.label;
            correct += usize::from(p.label == labels[i]);
        }
        fold_accuracies.push(correct as f64 / test_idx.len() as f64);
    }
    let mut result = EvalResult::from_predictions(&labels, &predicted)?;
    result.fold_assignments = matrix
        .rows
        .iter()
        .zip(&folds)
        .map(|(r, &f)| (r.doc_id.clone(), f))
        .collect();
    result.fold_accuracies = fold_accuracies;
    Ok(result)
}
