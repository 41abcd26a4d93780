use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::LanguageCode;
use crate::error::{Error, Result};
use crate::features::{FeatureSet, REFERENCE_LANGUAGES};
use crate::forest::EvalResult;
use crate::stats::{t_test, TTest, TestKind};

use super::{table3_train_sets, train_label, ProfilePolicy, Setup};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellStatus {
    Completed {
        result: EvalResult,
        notes: Vec<String>,
    },
    Skipped {
        reason: String,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub train_languages: Vec<LanguageCode>,
    pub test_language: LanguageCode,
    pub feature_set: FeatureSet,
    pub setup: Setup,
    #[serde(flatten)]
    pub status: CellStatus,
}

impl CellRecord {
    pub fn result(&self) -> Option<&EvalResult> {
        match &self.status {
            CellStatus::Completed { result, .. } => Some(result),
            _ => None,
        }
    }

    pub fn train_label(&self) -> String {
        train_label(&self.train_languages)
    }

    /// Signed difference of confusion matrices (`self - other`), when both
    /// cells completed.
    pub fn confusion_delta(&self, other: &CellRecord) -> Option<Vec<Vec<i64>>> {
        Some(self.result()?.confusion.delta(&other.result()?.confusion))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub forest_seed: u64,
    pub fold_seed: u64,
    pub folds: usize,
    pub num_trees: usize,
    pub top_fraction: f64,
    pub profile_policy: ProfilePolicy,
    pub embeddings_loaded: bool,
    /// Seconds since the Unix epoch; left empty for reproducible output.
    pub generated_unix: Option<u64>,
}

/// A filter over report cells. Unset fields match everything.
///
/// Parsed from comma-separated `key=value` pairs, e.g.
/// `setup=singular,features=trad-crossngo,exclude=eng`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSelector {
    pub setup: Option<Setup>,
    pub feature_set: Option<FeatureSet>,
    pub test_language: Option<LanguageCode>,
    pub train_languages: Option<Vec<LanguageCode>>,
    /// Drop cells whose training set contains any of these.
    pub exclude: Vec<LanguageCode>,
}

impl CellSelector {
    pub fn matches(&self, cell: &CellRecord) -> bool {
        self.setup.map_or(true, |s| s == cell.setup)
            && self.feature_set.map_or(true, |f| f == cell.feature_set)
            && self.test_language.as_ref().map_or(true, |t| *t == cell.test_language)
            && self.train_languages.as_ref().map_or(true, |t| {
                let mut a = t.clone();
                let mut b = cell.train_languages.clone();
                a.sort();
                b.sort();
                a == b
            })
            && !cell.train_languages.iter().any(|l| self.exclude.contains(l))
    }
}

impl std::fmt::Display for CellSelector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        if let Some(s) = self.setup {
            parts.push(format!("setup={s}"));
        }
        if let Some(fs) = self.feature_set {
            parts.push(format!("features={fs}"));
        }
        if let Some(t) = &self.test_language {
            parts.push(format!("test={t}"));
        }
        if let Some(t) = &self.train_languages {
            let joined: Vec<&str> = t.iter().map(LanguageCode::as_str).collect();
            parts.push(format!("train={}", joined.join("+")));
        }
        if !self.exclude.is_empty() {
            let joined: Vec<&str> = self.exclude.iter().map(LanguageCode::as_str).collect();
            parts.push(format!("exclude={}", joined.join("+")));
        }
        if parts.is_empty() {
            f.write_str("*")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

impl FromStr for CellSelector {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut sel = CellSelector::default();
        let langs = |v: &str| v.split('+').map(LanguageCode::new).collect::<Result<Vec<_>>>();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty() && *p != "*") {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("selector part `{pair}` is not key=value")))?;
            match key.trim() {
                "setup" => {
                    sel.setup = Some(match value.trim() {
                        "singular" => Setup::Singular,
                        "pairwise" => Setup::Pairwise,
                        "full" => Setup::Full,
                        other => return Err(Error::InvalidParameter(format!("unknown setup `{other}`"))),
                    })
                }
                "features" => sel.feature_set = Some(value.trim().parse()?),
                "test" => sel.test_language = Some(LanguageCode::new(value.trim())?),
                "train" => sel.train_languages = Some(langs(value.trim())?),
                "exclude" => sel.exclude = langs(value.trim())?,
                other => return Err(Error::InvalidParameter(format!("unknown selector key `{other}`"))),
            }
        }
        Ok(sel)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub group_a: String,
    pub group_b: String,
    pub n_a: usize,
    pub n_b: usize,
    pub test: TTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub metadata: ReportMetadata,
    pub cells: Vec<CellRecord>,
    pub significance: Vec<Comparison>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    /// Completed cells matching `sel`, in report order.
    pub fn select<'a>(&'a self, sel: &'a CellSelector) -> impl Iterator<Item = &'a CellRecord> + 'a {
        self.cells.iter().filter(move |c| sel.matches(c) && c.result().is_some())
    }

    /// Accuracy (percent) of the selected cells, in report order.
    pub fn scores(&self, sel: &CellSelector) -> Vec<f64> {
        self.select(sel)
            .filter_map(|c| c.result().map(|r| r.accuracy * 100.0))
            .collect()
    }

    /// t-test between two groups of cell accuracies. Paired tests match
    /// cells by position, so both selectors must yield equally long lists.
    pub fn compare_groups(&self, a: &CellSelector, b: &CellSelector, kind: TestKind) -> Result<Comparison> {
        let sa = self.scores(a);
        let sb = self.scores(b);
        if kind == TestKind::Paired && sa.len() != sb.len() {
            return Err(Error::LengthMismatch(sa.len(), sb.len()));
        }
        Ok(Comparison {
            group_a: a.to_string(),
            group_b: b.to_string(),
            n_a: sa.len(),
            n_b: sb.len(),
            test: t_test(kind, &sa, &sb)?,
        })
    }

    /// Runs [`Self::compare_groups`] and keeps the outcome in the report.
    pub fn record_comparison(&mut self, a: &CellSelector, b: &CellSelector, kind: TestKind) -> Result<&Comparison> {
        let cmp = self.compare_groups(a, b, kind)?;
        self.significance.push(cmp);
        Ok(self.significance.last().expect("just pushed"))
    }

    pub fn cell(&self, train: &[&str], test: &str, set: FeatureSet) -> Option<&CellRecord> {
        self.cells.iter().find(|c| {
            c.feature_set == set
                && c.test_language.as_str() == test
                && c.train_languages.iter().map(LanguageCode::as_str).eq(train.iter().copied())
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Accuracy table with one row per training set and one column block
    /// per test language.
    pub fn to_table(&self) -> String {
        let mut rows: Vec<Vec<LanguageCode>> = table3_train_sets()
            .into_iter()
            .map(|r| r.into_iter().map(|s| LanguageCode::new(s).expect("valid code")).collect())
            .collect();
        for cell in &self.cells {
            if !rows.contains(&cell.train_languages) {
                rows.push(cell.train_languages.clone());
            }
        }
        let mut tests: Vec<LanguageCode> = REFERENCE_LANGUAGES
            .iter()
            .map(|s| LanguageCode::new(s).expect("valid code"))
            .collect();
        for cell in &self.cells {
            if !tests.contains(&cell.test_language) {
                tests.push(cell.test_language.clone());
            }
        }
        tests.retain(|t| self.cells.iter().any(|c| c.test_language == *t));
        rows.retain(|r| self.cells.iter().any(|c| c.train_languages == *r));

        let mut out = String::from("Model");
        for t in &tests {
            for set in FeatureSet::ALL_SETS {
                let _ = write!(out, "\t{}:{}", t.as_str().to_uppercase(), set.label());
            }
        }
        out.push('\n');
        for row in &rows {
            out.push_str(&train_label(row));
            for t in &tests {
                for set in FeatureSet::ALL_SETS {
                    let cell = self
                        .cells
                        .iter()
                        .find(|c| c.train_languages == *row && c.test_language == *t && c.feature_set == set);
                    let text = match cell.map(|c| &c.status) {
                        None => "-".to_string(),
                        Some(CellStatus::Completed { result, .. }) => format!("{:.3}", result.accuracy * 100.0),
                        Some(CellStatus::Skipped { .. }) => "skip".to_string(),
                        Some(CellStatus::Failed { .. }) => "fail".to_string(),
                    };
                    let _ = write!(out, "\t{text}");
                }
            }
            out.push('\n');
        }
        for cmp in &self.significance {
            let _ = writeln!(
                out,
                "# {:?} t-test [{}] vs [{}]: t = {:.4}, df = {:.2}, p = {:.4}",
                cmp.test.kind, cmp.group_a, cmp.group_b, cmp.test.t, cmp.test.df, cmp.test.p_two_tailed
            );
        }
        for note in &self.notes {
            let _ = writeln!(out, "# {note}");
        }
        out
    }
}
