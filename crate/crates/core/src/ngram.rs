//! Character n-gram profiles and rank-biased overlap between them.

use std::collections::{HashMap, HashSet};
use std::fmt::{Debug, Write as _};
use std::hash::Hash;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Document, LanguageCode};
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// Default RBO persistence.
pub const DEFAULT_PERSISTENCE: f64 = 0.9;
/// Default share of n-gram types kept in a profile.
pub const DEFAULT_TOP_FRACTION: f64 = 0.25;

/// Ranked character n-gram counts for one language, cut to the most
/// frequent `top_fraction` of types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramProfile {
    pub language: LanguageCode,
    pub n: usize,
    pub top_fraction: f64,
    /// Sorted by count descending, then n-gram ascending.
    pub entries: Vec<(String, u64)>,
}

impl NgramProfile {
    /// N-grams in rank order.
    pub fn ranked(&self) -> Vec<&str> {
        self.entries.iter().map(|(g, _)| g.as_str()).collect()
    }

    pub fn top_set(&self) -> HashSet<&str> {
        self.entries.iter().map(|(g, _)| g.as_str()).collect()
    }

    /// Writes the two-line header followed by one `ngram<TAB>count` row per
    /// entry.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# language={} n={} top_fraction={}\nngram\tcount\n",
            self.language, self.n, self.top_fraction
        );
        for (gram, count) in &self.entries {
            let _ = writeln!(out, "{gram}\t{count}");
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self> {
        let bad = |line: usize, reason: &str| Error::MalformedRow {
            path: "<profile>".into(),
            line,
            reason: reason.into(),
        };
        let mut lines = text.lines();
        let meta = lines
            .next()
            .and_then(|l| l.strip_prefix('#'))
            .ok_or_else(|| bad(1, "missing `# language=.. n=.. top_fraction=..` header"))?;
        let mut language = None;
        let mut n = None;
        let mut top_fraction = None;
        for pair in meta.split_whitespace() {
            match pair.split_once('=') {
                Some(("language", v)) => language = Some(LanguageCode::new(v)?),
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("top_fraction", v)) => top_fraction = v.parse::<f64>().ok(),
                _ => {}
            }
        }
        let (Some(language), Some(n), Some(top_fraction)) = (language, n, top_fraction) else {
            return Err(bad(1, "header needs language, n and top_fraction"));
        };
        if lines.next().map(str::trim) != Some("ngram\tcount") {
            return Err(bad(2, "expected column header `ngram<TAB>count`"));
        }
        let mut entries = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (gram, count) = line
                .split_once('\t')
                .ok_or_else(|| bad(i + 3, "expected two tab-separated fields"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| bad(i + 3, "count is not a non-negative integer"))?;
            if gram.chars().count() != n || count == 0 {
                return Err(bad(i + 3, "n-gram length or count out of range"));
            }
            entries.push((gram.to_string(), count));
        }
        let profile = NgramProfile {
            language,
            n,
            top_fraction,
            entries,
        };
        let mut sorted = profile.entries.clone();
        sort_entries(&mut sorted);
        if sorted != profile.entries {
            return Err(bad(3, "entries are not in rank order"));
        }
        Ok(profile)
    }

    pub fn read(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        NgramProfile::from_tsv(&std::fs::read_to_string(path)?)
    }
}

fn sort_entries(entries: &mut [(String, u64)]) {
    entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
}

/// Character n-grams inside one word, in order of occurrence.
pub fn word_ngrams(word: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    let chars: Vec<char> = word.chars().collect();
    let count = chars.len().saturating_sub(n.saturating_sub(1));
    let count = if n == 0 || chars.len() < n { 0 } else { count };
    (0..count).map(move |i| chars[i..i + n].iter().collect())
}

/// Distinct n-grams over all tokens of a document.
pub fn unique_ngrams(doc: &Document, n: usize) -> HashSet<String> {
    doc.tokens().flat_map(|t| word_ngrams(t, n)).collect()
}

fn count_document(doc: &Document, n: usize) -> HashMap<String, u64> {
    let mut counts = HashMap::new();
    for token in doc.tokens() {
        for gram in word_ngrams(token, n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

fn check_profile_params(n: usize, top_fraction: f64) -> Result<()> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!("n must be 2 or 3, got {n}")));
    }
    if !(top_fraction > 0.0 && top_fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "top fraction must lie in (0, 1], got {top_fraction}"
        )));
    }
    Ok(())
}

/// Number of types kept by a top-fraction cut.
pub fn kept_types(unique_types: usize, top_fraction: f64) -> usize {
    // The epsilon keeps e.g. 0.1 * 30 from rounding up to 4.
    let kept = (top_fraction * unique_types as f64 - 1e-9).ceil() as usize;
    kept.clamp(1, unique_types.max(1))
}

pub fn build_profile(corpus: &Corpus, n: usize, top_fraction: f64) -> Result<NgramProfile> {
    build_profile_from(
        &corpus.language,
        &corpus.documents.iter().collect::<Vec<_>>(),
        n,
        top_fraction,
        Execution::default(),
    )
}

/// Builds a profile from any subset of a language's documents.
///
/// N-grams never cross word boundaries; words shorter than `n` contribute
/// nothing.
pub fn build_profile_from(
    language: &LanguageCode,
    docs: &[&Document],
    n: usize,
    top_fraction: f64,
    exec: Execution,
) -> Result<NgramProfile> {
    check_profile_params(n, top_fraction)?;
    let partials = par::map(exec, docs, |doc| count_document(doc, n));
    let mut totals: HashMap<String, u64> = HashMap::new();
    for partial in partials {
        for (gram, count) in partial {
            *totals.entry(gram).or_insert(0) += count;
        }
    }
    if totals.is_empty() {
        return Err(Error::NoNgrams {
            n,
            context: format!("no {language} word has at least {n} letters"),
        });
    }
    let mut entries: Vec<(String, u64)> = totals.into_iter().collect();
    sort_entries(&mut entries);
    entries.truncate(kept_types(entries.len(), top_fraction));
    Ok(NgramProfile {
        language: language.clone(),
        n,
        top_fraction,
        entries,
    })
}

fn check_list<T: Eq + Hash + Debug>(list: &[T]) -> Result<()> {
    if list.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut seen = HashSet::with_capacity(list.len());
    for item in list {
        if !seen.insert(item) {
            return Err(Error::DuplicateItem(format!("{item:?}")));
        }
    }
    Ok(())
}

/// Extrapolated rank-biased overlap of two rankings.
///
/// With `k = min(|a|, |b|)` and `X_d` the overlap of the depth-`d`
/// prefixes, returns `X_k/k * p^k + (1-p)/p * sum_{d<=k} X_d/d * p^d`.
/// At `p = 1` this is the average overlap `1/k * sum_{d<=k} X_d/d`.
pub fn rbo<T: Eq + Hash + Debug>(a: &[T], b: &[T], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "persistence must lie in (0, 1], got {p}"
        )));
    }
    check_list(a)?;
    check_list(b)?;

    let k = a.len().min(b.len());
    let mut seen_a = HashSet::with_capacity(k);
    let mut seen_b = HashSet::with_capacity(k);
    let mut overlap = 0usize;
    let mut weighted = 0.0;
    let mut average = 0.0;
    let mut weight = 1.0;
    for d in 1..=k {
        let (x, y) = (&a[d - 1], &b[d - 1]);
        if x == y {
            overlap += 1;
        } else {
            overlap += usize::from(seen_b.contains(x)) + usize::from(seen_a.contains(y));
        }
        seen_a.insert(x);
        seen_b.insert(y);
        let agreement = overlap as f64 / d as f64;
        weight *= p;
        weighted += agreement * weight;
        average += agreement;
    }

    let value = if p == 1.0 {
        average / k as f64
    } else {
        let tail = overlap as f64 / k as f64 * weight;
        tail + (1.0 - p) / p * weighted
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Pairwise RBO between language profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub languages: Vec<LanguageCode>,
    pub n: usize,
    pub p: f64,
    pub values: Vec<Vec<f64>>,
}

impl OverlapMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.languages.iter().position(|l| l.as_str() == a)?;
        let j = self.languages.iter().position(|l| l.as_str() == b)?;
        Some(self.values[i][j])
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for lang in &self.languages {
            let _ = write!(out, "\t{lang}");
        }
        out.push('\n');
        for (lang, row) in self.languages.iter().zip(&self.values) {
            out.push_str(lang.as_str());
            for v in row {
                let _ = write!(out, "\t{v:.6}");
            }
            out.push('\n');
        }
        out
    }
}

pub fn overlap_matrix(profiles: &[NgramProfile], p: f64) -> Result<OverlapMatrix> {
    let first = profiles.first().ok_or(Error::EmptyList)?;
    if let Some(other) = profiles.iter().find(|q| q.n != first.n) {
        return Err(Error::ProfileMismatch(format!(
            "{} uses n={} but {} uses n={}",
            first.language, first.n, other.language, other.n
        )));
    }
    let ranked: Vec<Vec<&str>> = profiles.iter().map(NgramProfile::ranked).collect();
    let size = profiles.len();
    let mut values = vec![vec![0.0; size]; size];
    for i in 0..size {
        values[i][i] = 1.0;
        for j in i + 1..size {
            let v = rbo(&ranked[i], &ranked[j], p)?;
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    Ok(OverlapMatrix {
        languages: profiles.iter().map(|q| q.language.clone()).collect(),
        n: first.n,
        p,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::GradeLabel;
    use proptest::prelude::*;

    fn corpus(texts: &[&str]) -> Corpus {
        let lang = LanguageCode::new("tgl").unwrap();
        let docs = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Document::new(&format!("d{i}"), lang.clone(), GradeLabel::new(1).unwrap(), t).unwrap())
            .collect();
        Corpus::new(lang, docs).unwrap()
    }

    #[test]
    fn profile_of_single_word() {
        let p = build_profile(&corpus(&["mata"]), 2, 1.0).unwrap();
        assert_eq!(
            p.entries,
            vec![("at".to_string(), 1), ("ma".to_string(), 1), ("ta".to_string(), 1)]
        );
    }

    #[test]
    fn no_space_spanning_ngrams() {
        let p = build_profile(&corpus(&["ab cd"]), 2, 1.0).unwrap();
        assert_eq!(p.ranked(), ["ab", "cd"]);
    }

    #[test]
    fn top_fraction_cut() {
        assert_eq!(kept_types(8, 0.25), 2);
        assert_eq!(kept_types(30, 0.1), 3);
        assert_eq!(kept_types(3, 0.01), 1);
        // eight distinct bigrams
        let p = build_profile(&corpus(&["abcdefghi"]), 2, 0.25).unwrap();
        assert_eq!(p.entries.len(), 2);
    }

    #[test]
    fn short_words_only() {
        let err = build_profile(&corpus(&["a b ab"]), 3, 1.0).unwrap_err();
        assert!(matches!(err, Error::NoNgrams { .. }));
    }

    #[test]
    fn invalid_params() {
        let c = corpus(&["mata"]);
        assert!(build_profile(&c, 4, 0.5).is_err());
        assert!(build_profile(&c, 2, 0.0).is_err());
        assert!(build_profile(&c, 2, 1.5).is_err());
    }

    #[test]
    fn tsv_round_trip() {
        let p = build_profile(&corpus(&["ang bata ay nasa bahay ng aso"]), 2, 0.5).unwrap();
        let back = NgramProfile::from_tsv(&p.to_tsv()).unwrap();
        assert_eq!(back, p);
        assert!(p.to_tsv().starts_with("# language=tgl n=2 top_fraction=0.5\nngram\tcount\n"));
    }

    #[test]
    fn rbo_edge_cases() {
        assert_eq!(rbo(&["x", "y"], &["x", "y"], 0.9).unwrap(), 1.0);
        assert_eq!(rbo(&["x", "y"], &["z", "w"], 0.9).unwrap(), 0.0);
        assert!(matches!(rbo::<&str>(&[], &["a"], 0.9), Err(Error::EmptyList)));
        assert!(matches!(rbo(&["a", "a"], &["a"], 0.9), Err(Error::DuplicateItem(_))));
        assert!(rbo(&["a"], &["a"], 0.0).is_err());
        assert!(rbo(&["a"], &["a"], 1.1).is_err());
    }

    #[test]
    fn matrix_of_one() {
        let p = build_profile(&corpus(&["mata"]), 2, 1.0).unwrap();
        let m = overlap_matrix(&[p], 0.9).unwrap();
        assert_eq!(m.values, vec![vec![1.0]]);
    }

    #[test]
    fn matrix_rejects_mixed_n() {
        let c = corpus(&["mata bata"]);
        let a = build_profile(&c, 2, 1.0).unwrap();
        let b = build_profile(&c, 3, 1.0).unwrap();
        assert!(matches!(overlap_matrix(&[a, b], 0.9), Err(Error::ProfileMismatch(_))));
    }

    proptest! {
        #[test]
        fn profile_is_deterministic(words in proptest::collection::vec("[a-e]{2,6}", 1..20)) {
            let text = words.join(" ");
            let c = corpus(&[&text, &text[..text.len() / 2 + 1]]);
            let a = build_profile_from(&c.language, &c.documents.iter().collect::<Vec<_>>(), 2, 0.5, Execution::Parallel);
            let b = build_profile_from(&c.language, &c.documents.iter().collect::<Vec<_>>(), 2, 0.5, Execution::Sequential);
            prop_assert_eq!(a.ok(), b.ok());
        }
    }
}
