//! Leveled corpora: manifest ingestion, text cleaning and segmentation.
//!
//! A corpus is read from a tab-separated manifest with the header
//! `id	language	grade	text_path` and an optional `text` column that is
//! used when `text_path` is empty. Paths are resolved relative to the
//! manifest.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three-letter lowercase language code (`tgl`, `bcl`, `ceb`, `eng`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguageCode(String);

impl LanguageCode {
    pub fn new(code: &str) -> Result<Self> {
        if code.len() == 3 && code.bytes().all(|b| b.is_ascii_lowercase()) {
            Ok(LanguageCode(code.to_string()))
        } else {
            Err(Error::InvalidLanguage(code.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LanguageCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LanguageCode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LanguageCode::new(s)
    }
}

impl TryFrom<String> for LanguageCode {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        LanguageCode::new(&s)
    }
}

impl From<LanguageCode> for String {
    fn from(code: LanguageCode) -> String {
        code.0
    }
}

/// Readability level assigned by annotators: 1, 2 or 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct GradeLabel(u8);

impl GradeLabel {
    pub const ALL: [GradeLabel; 3] = [GradeLabel(1), GradeLabel(2), GradeLabel(3)];

    pub fn new(level: u8) -> Result<Self> {
        match level {
            1..=3 => Ok(GradeLabel(level)),
            other => Err(Error::InvalidGrade(other.to_string())),
        }
    }

    pub fn level(self) -> u8 {
        self.0
    }

    /// Zero-based position in [`GradeLabel::ALL`].
    pub fn index(self) -> usize {
        usize::from(self.0 - 1)
    }
}

impl fmt::Display for GradeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for GradeLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let level: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidGrade(s.to_string()))?;
        GradeLabel::new(level)
    }
}

impl TryFrom<u8> for GradeLabel {
    type Error = Error;
    fn try_from(level: u8) -> Result<Self> {
        GradeLabel::new(level)
    }
}

impl From<GradeLabel> for u8 {
    fn from(g: GradeLabel) -> u8 {
        g.0
    }
}

/// Text cleaning switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizeOptions {
    /// Remove HTML character references such as `&nbsp;` before cleaning.
    /// When disabled the entity name survives as letters (`nbsp`).
    pub strip_entities: bool,
}

impl Default for NormalizeOptions {
    fn default() -> Self {
        NormalizeOptions {
            strip_entities: true,
        }
    }
}

fn entity_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"&(?:#[0-9]+|#[xX][0-9a-fA-F]+|[A-Za-z][A-Za-z0-9]*);").expect("valid regex")
    })
}

/// Replaces HTML character references with a space.
pub fn strip_entities(raw: &str) -> String {
    entity_regex().replace_all(raw, " ").into_owned()
}

/// Lowercases, strips HTML entities, replaces every non-letter with a
/// space and collapses whitespace. Diacritics are kept.
pub fn normalize_text(raw: &str) -> String {
    normalize_text_with(raw, NormalizeOptions::default())
}

pub fn normalize_text_with(raw: &str, opts: NormalizeOptions) -> String {
    let stripped;
    let text = if opts.strip_entities {
        stripped = strip_entities(raw);
        stripped.as_str()
    } else {
        raw
    };

    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars().flat_map(char::to_lowercase) {
        if c.is_alphabetic() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        } else {
            pending_space = true;
        }
    }
    out
}

/// Word tokens of already normalized text.
pub fn tokenize(normalized: &str) -> Vec<String> {
    normalized.split_whitespace().map(str::to_string).collect()
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?' | '\u{2026}')
}

/// Splits raw text on runs of terminal punctuation (`.`, `!`, `?`, `…`).
///
/// Segments are trimmed and empty ones dropped, so an ellipsis counts as a
/// single terminator and text without any terminator is one sentence.
pub fn split_sentences(raw: &str) -> Vec<String> {
    raw.split(is_terminator)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

/// Splits a sentence into phrases on commas, semicolons, colons and dashes.
///
/// A hyphen only separates phrases when it is doubled or next to
/// whitespace, so hyphenated words stay in one phrase.
pub fn split_phrases(sentence: &str) -> Vec<String> {
    let chars: Vec<char> = sentence.chars().collect();
    let mut phrases = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let boundary = match c {
            ',' | ';' | ':' | '\u{2013}' | '\u{2014}' | '\u{2015}' => true,
            '-' => {
                let prev = i.checked_sub(1).map(|j| chars[j]);
                let next = chars.get(i + 1).copied();
                let spaced = |x: Option<char>| x.map_or(true, |x| x.is_whitespace() || x == '-');
                spaced(prev) || spaced(next)
            }
            _ => false,
        };
        if boundary {
            phrases.push(std::mem::take(&mut current));
        } else {
            current.push(c);
        }
    }
    phrases.push(current);
    phrases
        .into_iter()
        .map(|p| p.trim().to_string())
        .filter(|p| !p.is_empty())
        .collect()
}

/// One leveled story.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub language: LanguageCode,
    pub grade: GradeLabel,
    pub raw_text: String,
    /// Normalized word tokens, one list per sentence.
    pub sentences: Vec<Vec<String>>,
    /// Number of punctuation-delimited segments that contain a word.
    pub phrases: usize,
}

impl Document {
    pub fn new(id: &str, language: LanguageCode, grade: GradeLabel, raw_text: &str) -> Result<Self> {
        Document::with_options(id, language, grade, raw_text, NormalizeOptions::default())
    }

    pub fn with_options(
        id: &str,
        language: LanguageCode,
        grade: GradeLabel,
        raw_text: &str,
        opts: NormalizeOptions,
    ) -> Result<Self> {
        // Entities go first: `&nbsp;` would otherwise end a phrase at the `;`.
        let stripped;
        let text = if opts.strip_entities {
            stripped = strip_entities(raw_text);
            stripped.as_str()
        } else {
            raw_text
        };
        let no_strip = NormalizeOptions {
            strip_entities: false,
        };

        let mut sentences = Vec::new();
        let mut phrases = 0;
        for sentence in split_sentences(text) {
            let tokens = tokenize(&normalize_text_with(&sentence, no_strip));
            if tokens.is_empty() {
                continue;
            }
            phrases += split_phrases(&sentence)
                .iter()
                .filter(|p| !normalize_text_with(p, no_strip).is_empty())
                .count();
            sentences.push(tokens);
        }
        if sentences.is_empty() {
            return Err(Error::EmptyDocument(id.to_string()));
        }
        Ok(Document {
            id: id.to_string(),
            language,
            grade,
            raw_text: raw_text.to_string(),
            sentences,
            phrases,
        })
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> + '_ {
        self.sentences.iter().flatten().map(String::as_str)
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Vec::len).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub language: LanguageCode,
    pub documents: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus, checking that languages agree and ids are unique.
    pub fn new(language: LanguageCode, documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.language != language {
                return Err(Error::LanguageMismatch {
                    expected: language.to_string(),
                    found: doc.language.to_string(),
                });
            }
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::DuplicateId(doc.id.clone()));
            }
        }
        Ok(Corpus {
            language,
            documents,
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeStats {
    pub doc_count: usize,
    pub sent_count: usize,
    pub vocab_size: usize,
}

/// Document, sentence and vocabulary counts per grade level.
pub fn corpus_stats(corpus: &Corpus) -> BTreeMap<GradeLabel, GradeStats> {
    let mut vocab: BTreeMap<GradeLabel, BTreeSet<&str>> = BTreeMap::new();
    let mut stats: BTreeMap<GradeLabel, GradeStats> = BTreeMap::new();
    for doc in &corpus.documents {
        let entry = stats.entry(doc.grade).or_default();
        entry.doc_count += 1;
        entry.sent_count += doc.sentences.len();
        vocab.entry(doc.grade).or_default().extend(doc.tokens());
    }
    for (grade, words) in vocab {
        if let Some(entry) = stats.get_mut(&grade) {
            entry.vocab_size = words.len();
        }
    }
    stats
}

/// Reads a manifest whose rows all belong to one language.
pub fn load_corpus(manifest_path: &Path) -> Result<Corpus> {
    load_corpus_with(manifest_path, NormalizeOptions::default())
}

pub fn load_corpus_with(manifest_path: &Path, opts: NormalizeOptions) -> Result<Corpus> {
    if !manifest_path.is_file() {
        return Err(Error::MissingFile(manifest_path.to_path_buf()));
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let display = manifest_path.display().to_string();
    let malformed = |line: usize, reason: String| Error::MalformedRow {
        path: display.clone(),
        line,
        reason,
    };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .quoting(false)
        .flexible(true)
        .from_path(manifest_path)?;
    let headers = reader.headers()?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let (Some(id_col), Some(lang_col), Some(grade_col)) =
        (column("id"), column("language"), column("grade"))
    else {
        return Err(malformed(
            1,
            "header must contain `id`, `language` and `grade`".into(),
        ));
    };
    let path_col = column("text_path");
    let text_col = column("text");
    if path_col.is_none() && text_col.is_none() {
        return Err(malformed(
            1,
            "header must contain `text_path` or `text`".into(),
        ));
    }

    let mut language: Option<LanguageCode> = None;
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (row_index, record) in reader.records().enumerate() {
        let line = row_index + 2;
        let record = record?;
        if record.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if record.len() != headers.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, found {}", headers.len(), record.len()),
            ));
        }
        let field = |col: usize| record.get(col).unwrap_or("").trim();

        let id = field(id_col);
        if id.is_empty() {
            return Err(malformed(line, "empty id".into()));
        }
        let lang = LanguageCode::new(field(lang_col))?;
        let grade: GradeLabel = field(grade_col).parse()?;
        match &language {
            None => language = Some(lang.clone()),
            Some(expected) if *expected != lang => {
                return Err(Error::LanguageMismatch {
                    expected: expected.to_string(),
                    found: lang.to_string(),
                })
            }
            Some(_) => {}
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId(id.to_string()));
        }

        let rel_path = path_col.map(field).unwrap_or("");
        let text = if !rel_path.is_empty() {
            let path = base.join(rel_path);
            if !path.is_file() {
                return Err(Error::MissingFile(path));
            }
            std::fs::read_to_string(&path)?
        } else {
            match text_col {
                Some(col) => record.get(col).unwrap_or("").to_string(),
                None => String::new(),
            }
        };
        documents.push(Document::with_options(id, lang, grade, &text, opts)?);
    }

    let language = language.ok_or_else(|| malformed(1, "manifest has no rows".into()))?;
    Corpus::new(language, documents)
}
