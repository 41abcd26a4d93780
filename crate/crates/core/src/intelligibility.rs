//! Genetic distance between languages from an aligned wordlist, and the
//! conventional relatedness bands for interpreting it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_text, LanguageCode};
use crate::error::{Error, Result};

/// Stands in for the `ng` digraph in consonant skeletons.
pub const NG_SYMBOL: char = 'ŋ';

const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];

/// Concept glosses with one translation per language.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedWordlist {
    pub languages: Vec<LanguageCode>,
    pub concepts: Vec<(String, BTreeMap<LanguageCode, String>)>,
}

impl AlignedWordlist {
    /// Parses a tab-separated wordlist with header `concept<TAB>lang1<TAB>...`.
    ///
    /// Every cell must be filled unless `skip_incomplete` is set, in which
    /// case concepts with any empty cell are dropped.
    pub fn from_tsv(text: &str, skip_incomplete: bool) -> Result<Self> {
        let bad = |line: usize, reason: String| Error::MalformedRow {
            path: "<wordlist>".into(),
            line,
            reason,
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| bad(1, "empty wordlist".into()))?;
        let mut columns = header.split('\t').map(str::trim);
        if columns.next() != Some("concept") {
            return Err(bad(1, "first column must be `concept`".into()));
        }
        let languages = columns.map(LanguageCode::new).collect::<Result<Vec<_>>>()?;
        if languages.is_empty() {
            return Err(bad(1, "no language columns".into()));
        }

        let mut concepts = Vec::new();
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.split('\t').collect();
            if cells.len() > languages.len() + 1 {
                return Err(bad(i + 1, format!("expected {} fields", languages.len() + 1)));
            }
            let concept = cells[0].trim().to_string();
            let mut words = BTreeMap::new();
            let mut complete = true;
            for (j, lang) in languages.iter().enumerate() {
                // Multi-word glosses are read as one word.
                let word: String = normalize_text(cells.get(j + 1).copied().unwrap_or(""))
                    .split(' ')
                    .collect();
                if word.is_empty() {
                    complete = false;
                }
                words.insert(lang.clone(), word);
            }
            if !complete {
                if skip_incomplete {
                    continue;
                }
                return Err(bad(i + 1, format!("concept `{concept}` has an empty cell")));
            }
            concepts.push((concept, words));
        }
        Ok(AlignedWordlist {
            languages,
            concepts,
        })
    }

    pub fn read(path: &Path, skip_incomplete: bool) -> Result<Self> {
        if !path.is_file() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        AlignedWordlist::from_tsv(&std::fs::read_to_string(path)?, skip_incomplete).map_err(|e| match e {
            Error::MalformedRow { line, reason, .. } => Error::MalformedRow {
                path: path.display().to_string(),
                line,
                reason,
            },
            other => other,
        })
    }
}

/// Removes vowels and collapses `ng` to [`NG_SYMBOL`].
pub fn consonant_skeleton(word: &str) -> String {
    word.replace("ng", &NG_SYMBOL.to_string())
        .chars()
        .filter(|c| !VOWELS.contains(c))
        .collect()
}

/// `100 * (1 - match / n)`, where `match` counts concepts whose two
/// translations have identical consonant skeletons.
pub fn genetic_distance(wl: &AlignedWordlist, l1: &LanguageCode, l2: &LanguageCode) -> Result<f64> {
    for lang in [l1, l2] {
        if !wl.languages.contains(lang) {
            return Err(Error::MissingLanguage(lang.to_string()));
        }
    }
    if wl.concepts.is_empty() {
        return Err(Error::InvalidParameter("wordlist has no concepts".into()));
    }
    let matches = wl
        .concepts
        .iter()
        .filter(|(_, words)| consonant_skeleton(&words[l1]) == consonant_skeleton(&words[l2]))
        .count();
    let n = wl.concepts.len();
    // same value as 100 * (1 - match / n), without the rounding noise
    Ok(100.0 * (n - matches) as f64 / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relatedness {
    HighlyRelated,
    Related,
    RemotelyRelated,
    VeryRemotelyRelated,
    NoRecognizableRelationship,
}

impl Relatedness {
    pub fn description(self) -> &'static str {
        match self {
            Relatedness::HighlyRelated => "highly related languages",
            Relatedness::Related => "related languages",
            Relatedness::RemotelyRelated => "remotely related languages",
            Relatedness::VeryRemotelyRelated => "very remotely related languages",
            Relatedness::NoRecognizableRelationship => "no recognizable relationship",
        }
    }
}

/// Band for a distance in `[0, 100]`; lower bounds are inclusive.
///
/// Distances below 1 are classed as highly related and flagged as
/// (near-)identical in the second field.
pub fn classify_distance(d: f64) -> Result<(Relatedness, bool)> {
    if !(0.0..=100.0).contains(&d) {
        return Err(Error::InvalidParameter(format!(
            "distance must lie in [0, 100], got {d}"
        )));
    }
    let band = match d {
        d if d < 30.0 => Relatedness::HighlyRelated,
        d if d < 50.0 => Relatedness::Related,
        d if d < 70.0 => Relatedness::RemotelyRelated,
        d if d < 78.0 => Relatedness::VeryRemotelyRelated,
        _ => Relatedness::NoRecognizableRelationship,
    };
    Ok((band, d < 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub l1: LanguageCode,
    pub l2: LanguageCode,
    pub distance: f64,
    pub category: Relatedness,
    pub identical: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub concepts: usize,
    pub pairs: Vec<PairDistance>,
}

impl DistanceReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("l1\tl2\tdistance\tcategory\n");
        for p in &self.pairs {
            let _ = writeln!(
                out,
                "{}\t{}\t{:.3}\t{:?}",
                p.l1, p.l2, p.distance, p.category
            );
        }
        out
    }
}

/// Distances and bands for every unordered language pair.
pub fn distance_report(wl: &AlignedWordlist) -> Result<DistanceReport> {
    let mut pairs = Vec::new();
    for (i, l1) in wl.languages.iter().enumerate() {
        for l2 in &wl.languages[i + 1..] {
            let distance = genetic_distance(wl, l1, l2)?;
            let (category, identical) = classify_distance(distance)?;
            pairs.push(PairDistance {
                l1: l1.clone(),
                l2: l2.clone(),
                distance,
                category,
                identical,
            });
        }
    }
    Ok(DistanceReport {
        concepts: wl.concepts.len(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn code(s: &str) -> LanguageCode {
        LanguageCode::new(s).unwrap()
    }

    #[test]
    fn skeletons() {
        assert_eq!(consonant_skeleton("mata"), "mt");
        assert_eq!(consonant_skeleton("tubig"), "tbg");
        assert_eq!(consonant_skeleton("ngipin"), "ŋpn");
        assert_eq!(consonant_skeleton("aeiou"), "");
    }

    #[test]
    fn four_concepts_three_matches() {
        let wl = AlignedWordlist::from_tsv(
            "concept\ttgl\tceb\nwater\ttubig\ttubig\neye\tmata\tmata\ntooth\tngipin\tngipon\ndog\taso\tiro\n",
            false,
        )
        .unwrap();
        assert_eq!(genetic_distance(&wl, &code("tgl"), &code("ceb")).unwrap(), 25.0);
        assert_eq!(genetic_distance(&wl, &code("tgl"), &code("tgl")).unwrap(), 0.0);
    }

    #[test]
    fn missing_language_and_empty_cells() {
        let text = "concept\ttgl\tceb\nwater\ttubig\t\n";
        assert!(AlignedWordlist::from_tsv(text, false).is_err());
        let wl = AlignedWordlist::from_tsv(text, true).unwrap();
        assert!(wl.concepts.is_empty());
        let wl = AlignedWordlist::from_tsv("concept\ttgl\nwater\ttubig\n", false).unwrap();
        assert!(matches!(
            genetic_distance(&wl, &code("tgl"), &code("bcl")),
            Err(Error::MissingLanguage(_))
        ));
    }

    #[test]
    fn bands() {
        assert_eq!(classify_distance(24.846).unwrap().0, Relatedness::HighlyRelated);
        assert_eq!(classify_distance(37.083).unwrap().0, Relatedness::Related);
        assert_eq!(classify_distance(50.0).unwrap().0, Relatedness::RemotelyRelated);
        assert_eq!(classify_distance(70.735).unwrap().0, Relatedness::VeryRemotelyRelated);
        assert_eq!(classify_distance(95.690).unwrap().0, Relatedness::NoRecognizableRelationship);
        assert_eq!(classify_distance(100.0).unwrap().0, Relatedness::NoRecognizableRelationship);
        assert_eq!(classify_distance(0.0).unwrap(), (Relatedness::HighlyRelated, true));
        assert!(classify_distance(-0.1).is_err());
        assert!(classify_distance(100.5).is_err());
    }

    fn wordlist(rows: &[(String, String)]) -> AlignedWordlist {
        let mut text = String::from("concept\taaa\tbbb\n");
        for (i, (a, b)) in rows.iter().enumerate() {
            text.push_str(&format!("c{i}\t{a}\t{b}\n"));
        }
        AlignedWordlist::from_tsv(&text, false).unwrap()
    }

    proptest! {
        #[test]
        fn symmetric_and_monotone(
            rows in proptest::collection::vec(("[a-z]{1,5}a", "[a-z]{1,5}a"), 1..12),
            extra in "[a-z]{1,5}",
        ) {
            let (a, b) = (code("aaa"), code("bbb"));
            let wl = wordlist(&rows);
            let d = genetic_distance(&wl, &a, &b).unwrap();
            prop_assert_eq!(d, genetic_distance(&wl, &b, &a).unwrap());
            prop_assert_eq!(genetic_distance(&wl, &a, &a).unwrap(), 0.0);

            let mut matching = rows.clone();
            matching.push((extra.clone(), extra.clone()));
            prop_assert!(genetic_distance(&wordlist(&matching), &a, &b).unwrap() <= d + 1e-12);

            let matches = |wl: &AlignedWordlist| {
                ((1.0 - genetic_distance(wl, &a, &b).unwrap() / 100.0) * wl.concepts.len() as f64).round()
            };
            let mut mismatching = rows.clone();
            mismatching.push((format!("{extra}b"), format!("{extra}c")));
            prop_assert!(matches(&wordlist(&mismatching)) >= matches(&wl));
        }
    }
}
