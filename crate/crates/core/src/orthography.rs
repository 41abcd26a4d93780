//! Consonant/vowel skeletons and rule-based syllabification.
//!
//! Words are read as a sequence of orthographic units: single letters,
//! except that `ng` is one consonant unit when digraph handling is on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ten syllable templates whose densities are model features.
pub const SYLLABLE_TEMPLATES: [&str; 10] = [
    "v", "cv", "vc", "cvc", "vcc", "ccv", "cvcc", "ccvc", "ccvcc", "ccvccc",
];

const DEFAULT_VOWELS: &str = "aeiouáàâäéèêëíìîïóòôöúùûü";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthographyConfig {
    /// Characters treated as vowels. Everything else is a consonant.
    pub vowels: String,
    /// Read `ng` as a single consonant unit.
    pub ng_digraph: bool,
}

impl Default for OrthographyConfig {
    fn default() -> Self {
        OrthographyConfig {
            vowels: DEFAULT_VOWELS.to_string(),
            ng_digraph: true,
        }
    }
}

impl OrthographyConfig {
    /// Settings for English text: same vowels, no `ng` digraph.
    pub fn english() -> Self {
        OrthographyConfig {
            ng_digraph: false,
            ..Default::default()
        }
    }

    pub fn for_language(code: &str) -> Self {
        if code == "eng" {
            Self::english()
        } else {
            Self::default()
        }
    }

    pub fn is_vowel(&self, c: char) -> bool {
        self.vowels.contains(c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Unit {
    start: usize,
    end: usize,
    vowel: bool,
}

fn units(word: &str, cfg: &OrthographyConfig) -> Vec<Unit> {
    let mut out = Vec::with_capacity(word.len());
    let mut iter = word.char_indices().peekable();
    while let Some((start, c)) = iter.next() {
        let mut end = start + c.len_utf8();
        if cfg.ng_digraph && c == 'n' {
            if let Some(&(next_start, 'g')) = iter.peek() {
                end = next_start + 1;
                iter.next();
            }
        }
        out.push(Unit {
            start,
            end,
            vowel: cfg.is_vowel(c),
        });
    }
    out
}

fn check_letters(word: &str) -> Result<()> {
    if word.is_empty() || !word.chars().all(char::is_alphabetic) {
        return Err(Error::NonLetterWord(word.to_string()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CvSkeleton {
    pub word: String,
    pub skeleton: String,
}

/// Maps each orthographic unit of `word` to `c` or `v`.
pub fn cv_skeleton(word: &str, cfg: &OrthographyConfig) -> Result<CvSkeleton> {
    check_letters(word)?;
    let skeleton = units(word, cfg)
        .iter()
        .map(|u| if u.vowel { 'v' } else { 'c' })
        .collect();
    Ok(CvSkeleton {
        word: word.to_string(),
        skeleton,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Syllabification {
    pub word: String,
    pub syllables: Vec<String>,
    pub patterns: Vec<String>,
}

impl Syllabification {
    pub fn len(&self) -> usize {
        self.syllables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syllables.is_empty()
    }
}

/// Number of consonants of an intervocalic cluster that start the next
/// syllable. Onsets never exceed two consonants.
fn onset_len(cluster: usize) -> usize {
    match cluster {
        0 => 0,
        1 | 2 => 1,
        _ => 2,
    }
}

/// Splits a word into one syllable per vowel.
///
/// Between two nuclei a single consonant (or the second of two) opens the
/// next syllable; longer clusters give their last two consonants to the
/// next syllable and the rest to the previous one. Leading and trailing
/// consonants attach to the first and last syllable.
pub fn syllabify(word: &str, cfg: &OrthographyConfig) -> Result<Syllabification> {
    check_letters(word)?;
    let units = units(word, cfg);
    let nuclei: Vec<usize> = (0..units.len()).filter(|&i| units[i].vowel).collect();
    if nuclei.is_empty() {
        return Err(Error::NoVowel(word.to_string()));
    }

    // Unit index at which each syllable after the first begins.
    let mut starts = vec![0];
    for pair in nuclei.windows(2) {
        let cluster = pair[1] - pair[0] - 1;
        starts.push(pair[1] - onset_len(cluster));
    }
    starts.push(units.len());

    let mut syllables = Vec::with_capacity(nuclei.len());
    let mut patterns = Vec::with_capacity(nuclei.len());
    for bounds in starts.windows(2) {
        let span = &units[bounds[0]..bounds[1]];
        syllables.push(word[span[0].start..span[span.len() - 1].end].to_string());
        patterns.push(span.iter().map(|u| if u.vowel { 'v' } else { 'c' }).collect());
    }
    Ok(Syllabification {
        word: word.to_string(),
        syllables,
        patterns,
    })
}

/// Like [`syllabify`], but a vowel-less word becomes one syllable with an
/// all-consonant pattern instead of an error.
pub fn syllabify_or_fallback(word: &str, cfg: &OrthographyConfig) -> Result<Syllabification> {
    match syllabify(word, cfg) {
        Err(Error::NoVowel(_)) => {
            let skeleton = cv_skeleton(word, cfg)?;
            Ok(Syllabification {
                word: word.to_string(),
                syllables: vec![word.to_string()],
                patterns: vec![skeleton.skeleton],
            })
        }
        other => other,
    }
}

/// Number of maximal runs of two or more consonant units.
pub fn consonant_clusters(word: &str, cfg: &OrthographyConfig) -> usize {
    let mut clusters = 0;
    let mut run = 0;
    for unit in units(word, cfg) {
        if unit.vowel {
            run = 0;
        } else {
            run += 1;
            if run == 2 {
                clusters += 1;
            }
        }
    }
    clusters
}
