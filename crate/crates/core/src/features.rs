//! Per-document feature vectors.
//!
//! Column layout is fixed: 18 traditional features, then 6 cross-lingual
//! n-gram overlap features (`tgl`, `bcl`, `ceb` for bigrams, then the same
//! for trigrams), then 768 embedding dimensions. A [`FeatureSet`] picks
//! which blocks are present.

use std::collections::{BTreeMap, HashSet};
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, Document, GradeLabel, LanguageCode};
use crate::error::{Error, Result};
use crate::ngram::{build_profile_from, unique_ngrams, NgramProfile};
use crate::orthography::{consonant_clusters, syllabify, OrthographyConfig, SYLLABLE_TEMPLATES};
use crate::par::{self, Execution};

pub const TRAD_COUNT: usize = 18;
pub const EMBEDDING_DIM: usize = 768;
pub const REFERENCE_LANGUAGES: [&str; 3] = ["tgl", "bcl", "ceb"];
pub const CROSSNGO_ORDERS: [usize; 2] = [2, 3];
pub const CROSSNGO_COUNT: usize = REFERENCE_LANGUAGES.len() * CROSSNGO_ORDERS.len();

pub const TRAD_NAMES: [&str; TRAD_COUNT] = [
    "word_count",
    "phrase_count",
    "sentence_count",
    "avg_word_len",
    "avg_sentence_len",
    "avg_syllables_per_word",
    "polysyllable_count",
    "consonant_cluster_density",
    "syl_v",
    "syl_cv",
    "syl_vc",
    "syl_cvc",
    "syl_vcc",
    "syl_ccv",
    "syl_cvcc",
    "syl_ccvc",
    "syl_ccvcc",
    "syl_ccvccc",
];

/// Words with more syllables than this count as polysyllabic.
pub const POLYSYLLABLE_THRESHOLD: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeatureGroup {
    Trad,
    CrossNgo,
    Emb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSet {
    Trad,
    #[serde(rename = "trad-crossngo")]
    TradCrossNgo,
    Emb,
    All,
}

impl FeatureSet {
    pub const ALL_SETS: [FeatureSet; 4] = [
        FeatureSet::Trad,
        FeatureSet::TradCrossNgo,
        FeatureSet::Emb,
        FeatureSet::All,
    ];

    pub fn groups(self) -> &'static [FeatureGroup] {
        match self {
            FeatureSet::Trad => &[FeatureGroup::Trad],
            FeatureSet::TradCrossNgo => &[FeatureGroup::Trad, FeatureGroup::CrossNgo],
            FeatureSet::Emb => &[FeatureGroup::Emb],
            FeatureSet::All => &[FeatureGroup::Trad, FeatureGroup::CrossNgo, FeatureGroup::Emb],
        }
    }

    pub fn uses(self, group: FeatureGroup) -> bool {
        self.groups().contains(&group)
    }

    pub fn label(self) -> &'static str {
        match self {
            FeatureSet::Trad => "TRAD",
            FeatureSet::TradCrossNgo => "TRAD+CrossNGO",
            FeatureSet::Emb => "EMB",
            FeatureSet::All => "ALL",
        }
    }
}

impl fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureSet::Trad => "trad",
            FeatureSet::TradCrossNgo => "trad-crossngo",
            FeatureSet::Emb => "emb",
            FeatureSet::All => "all",
        })
    }
}

impl FromStr for FeatureSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['_', '+'], "-").as_str() {
            "trad" => Ok(FeatureSet::Trad),
            "trad-crossngo" => Ok(FeatureSet::TradCrossNgo),
            "emb" => Ok(FeatureSet::Emb),
            "all" => Ok(FeatureSet::All),
            _ => Err(Error::InvalidParameter(format!("unknown feature set `{s}`"))),
        }
    }
}

/// The 18 traditional features of a document, in [`TRAD_NAMES`] order.
///
/// Words without a vowel count toward word-level features but not toward
/// syllable statistics.
pub fn trad_features(doc: &Document, cfg: &OrthographyConfig) -> Result<[f64; TRAD_COUNT]> {
    let words = doc.word_count();
    if words == 0 {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let mut chars = 0usize;
    let mut clusters = 0usize;
    let mut syllabified_words = 0usize;
    let mut syllables = 0usize;
    let mut polysyllables = 0usize;
    let mut pattern_counts = [0usize; SYLLABLE_TEMPLATES.len()];

    for word in doc.tokens() {
        chars += word.chars().count();
        clusters += consonant_clusters(word, cfg);
        let Ok(syl) = syllabify(word, cfg) else {
            continue;
        };
        syllabified_words += 1;
        syllables += syl.len();
        if syl.len() > POLYSYLLABLE_THRESHOLD {
            polysyllables += 1;
        }
        for pattern in &syl.patterns {
            if let Some(i) = SYLLABLE_TEMPLATES.iter().position(|t| t == pattern) {
                pattern_counts[i] += 1;
            }
        }
    }
    if syllabified_words == 0 {
        return Err(Error::NoVowel(format!("every word of document `{}`", doc.id)));
    }

    let words_f = words as f64;
    let mut out = [0.0; TRAD_COUNT];
    out[0] = words_f;
    out[1] = doc.phrases as f64;
    out[2] = doc.sentences.len() as f64;
    out[3] = chars as f64 / words_f;
    out[4] = words_f / doc.sentences.len() as f64;
    out[5] = syllables as f64 / syllabified_words as f64;
    out[6] = polysyllables as f64;
    out[7] = clusters as f64 / words_f;
    for (slot, count) in out[8..].iter_mut().zip(pattern_counts) {
        *slot = count as f64 / syllables as f64;
    }
    Ok(out)
}

/// Share of the document's distinct `n`-grams that appear in each
/// profile's top list, one value per profile.
pub fn crossngo(doc: &Document, profiles: &[&NgramProfile], n: usize) -> Result<Vec<f64>> {
    if let Some(p) = profiles.iter().find(|p| p.n != n) {
        return Err(Error::ProfileMismatch(format!(
            "profile {} has n={}, expected {n}",
            p.language, p.n
        )));
    }
    let grams = unique_ngrams(doc, n);
    if grams.is_empty() {
        return Err(Error::NoNgrams {
            n,
            context: format!("document `{}`", doc.id),
        });
    }
    Ok(profiles
        .iter()
        .map(|p| {
            let top = p.top_set();
            let shared = grams.iter().filter(|g| top.contains(g.as_str())).count();
            shared as f64 / grams.len() as f64
        })
        .collect())
}

/// Top lists for every reference language and order, as used by the
/// CrossNGO block.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceProfiles {
    /// Indexed `[order][language]` following [`CROSSNGO_ORDERS`] and
    /// [`REFERENCE_LANGUAGES`].
    profiles: Vec<Vec<NgramProfile>>,
}

impl ReferenceProfiles {
    /// Arranges loose profiles into the fixed column order.
    pub fn from_profiles(profiles: Vec<NgramProfile>) -> Result<Self> {
        let top = profiles.first().map(|p| p.top_fraction);
        if let Some(p) = profiles.iter().find(|p| Some(p.top_fraction) != top) {
            return Err(Error::ProfileMismatch(format!(
                "profile {} n={} uses top fraction {}, others {:?}",
                p.language, p.n, p.top_fraction, top
            )));
        }
        let mut grid = Vec::new();
        for n in CROSSNGO_ORDERS {
            let mut row = Vec::new();
            for lang in REFERENCE_LANGUAGES {
                let p = profiles
                    .iter()
                    .find(|p| p.n == n && p.language.as_str() == lang)
                    .ok_or_else(|| {
                        Error::ProfileMismatch(format!("no profile for {lang} with n={n}"))
                    })?;
                row.push(p.clone());
            }
            grid.push(row);
        }
        Ok(ReferenceProfiles { profiles: grid })
    }

    /// Builds all six profiles from per-language document lists.
    pub fn build(
        docs: &BTreeMap<LanguageCode, Vec<&Document>>,
        top_fraction: f64,
        exec: Execution,
    ) -> Result<Self> {
        let mut profiles = Vec::new();
        for n in CROSSNGO_ORDERS {
            for lang in REFERENCE_LANGUAGES {
                let code = LanguageCode::new(lang)?;
                let lang_docs = docs
                    .get(&code)
                    .filter(|d| !d.is_empty())
                    .ok_or_else(|| Error::MissingLanguage(lang.to_string()))?;
                profiles.push(build_profile_from(&code, lang_docs, n, top_fraction, exec)?);
            }
        }
        ReferenceProfiles::from_profiles(profiles)
    }

    pub fn from_corpora(corpora: &[Corpus], top_fraction: f64, exec: Execution) -> Result<Self> {
        let docs = corpora
            .iter()
            .map(|c| (c.language.clone(), c.documents.iter().collect()))
            .collect();
        ReferenceProfiles::build(&docs, top_fraction, exec)
    }

    pub fn iter(&self) -> impl Iterator<Item = &NgramProfile> {
        self.profiles.iter().flatten()
    }

    /// The six CrossNGO values of one document.
    pub fn features(&self, doc: &Document) -> Result<[f64; CROSSNGO_COUNT]> {
        let mut out = [0.0; CROSSNGO_COUNT];
        for (i, (row, n)) in self.profiles.iter().zip(CROSSNGO_ORDERS).enumerate() {
            let refs: Vec<&NgramProfile> = row.iter().collect();
            let values = crossngo(doc, &refs, n)?;
            out[i * REFERENCE_LANGUAGES.len()..(i + 1) * REFERENCE_LANGUAGES.len()]
                .copy_from_slice(&values);
        }
        Ok(out)
    }
}

/// Document embeddings keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    vectors: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(vectors: BTreeMap<String, Vec<f64>>) -> Result<Self> {
        for (id, v) in &vectors {
            check_embedding(id, v)?;
        }
        Ok(EmbeddingTable { vectors })
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for i in 0..EMBEDDING_DIM {
            let _ = write!(out, ",e{i}");
        }
        out.push('\n');
        for (id, v) in &self.vectors {
            out.push_str(id);
            for x in v {
                let _ = write!(out, ",{x}");
            }
            out.push('\n');
        }
        out
    }
}

fn check_embedding(id: &str, v: &[f64]) -> Result<()> {
    if v.len() != EMBEDDING_DIM {
        return Err(Error::Embedding(format!(
            "`{id}` has {} values, expected {EMBEDDING_DIM}",
            v.len()
        )));
    }
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::Embedding(format!("`{id}` has a non-finite value at e{i}")));
    }
    Ok(())
}

/// Reads a comma-separated embedding file with header `id,e0,...,e767`.
pub fn load_embeddings(path: &Path) -> Result<EmbeddingTable> {
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    let expected = std::iter::once("id".to_string()).chain((0..EMBEDDING_DIM).map(|i| format!("e{i}")));
    if headers.len() != EMBEDDING_DIM + 1 || !headers.iter().map(str::trim).eq(expected) {
        return Err(Error::Embedding(format!(
            "header must be `id,e0,...,e{}` ({} columns found)",
            EMBEDDING_DIM - 1,
            headers.len()
        )));
    }
    let mut vectors = BTreeMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let id = record.get(0).unwrap_or("").trim().to_string();
        if id.is_empty() {
            return Err(Error::Embedding(format!("row {} has an empty id", i + 2)));
        }
        let values = record
            .iter()
            .skip(1)
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|_| {
                    Error::Embedding(format!("`{id}`: non-numeric cell `{cell}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        check_embedding(&id, &values)?;
        if vectors.insert(id.clone(), values).is_some() {
            return Err(Error::DuplicateId(id));
        }
    }
    Ok(EmbeddingTable { vectors })
}

/// Column names and group tags shared by every row of a matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub names: Vec<String>,
    pub groups: Vec<FeatureGroup>,
}

impl FeatureSchema {
    pub fn for_set(set: FeatureSet) -> Self {
        let mut names = Vec::new();
        let mut groups = Vec::new();
        for &group in set.groups() {
            let block: Vec<String> = match group {
                FeatureGroup::Trad => TRAD_NAMES.iter().map(|s| s.to_string()).collect(),
                FeatureGroup::CrossNgo => CROSSNGO_ORDERS
                    .iter()
                    .flat_map(|n| REFERENCE_LANGUAGES.iter().map(move |l| format!("crossngo_{l}_n{n}")))
                    .collect(),
                FeatureGroup::Emb => (0..EMBEDDING_DIM).map(|i| format!("emb_{i}")).collect(),
            };
            groups.extend(std::iter::repeat(group).take(block.len()));
            names.extend(block);
        }
        FeatureSchema { names, groups }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Hex SHA-256 over names and groups; models record it to refuse
    /// mismatched inputs.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (name, group) in self.names.iter().zip(&self.groups) {
            hasher.update(format!("{name}:{group:?}\n").as_bytes());
        }
        hasher
            .finalize()
            .iter()
            .fold(String::with_capacity(64), |mut s, b| {
                let _ = write!(s, "{b:02x}");
                s
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub doc_id: String,
    pub language: LanguageCode,
    pub label: GradeLabel,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    pub schema: FeatureSchema,
    pub rows: Vec<FeatureRow>,
}

#[derive(Serialize, Deserialize)]
struct SchemaSidecar {
    names: Vec<String>,
    groups: Vec<FeatureGroup>,
    label_column: String,
    fingerprint: String,
}

impl FeatureMatrix {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn labels(&self) -> Vec<GradeLabel> {
        self.rows.iter().map(|r| r.label).collect()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.rows.iter().map(|r| r.doc_id.as_str()).collect()
    }

    /// Rows at the given positions, in that order.
    pub fn select(&self, indices: &[usize]) -> FeatureMatrix {
        FeatureMatrix {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,language,grade");
        for name in &self.schema.names {
            let _ = write!(out, ",{name}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{},{}", row.doc_id, row.language, row.label);
            for v in &row.values {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn schema_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SchemaSidecar {
            names: self.schema.names.clone(),
            groups: self.schema.groups.clone(),
            label_column: "grade".into(),
            fingerprint: self.schema.fingerprint(),
        })?)
    }

    /// `features.csv` keeps its schema in `features.schema.json`.
    pub fn sidecar_path(csv_path: &Path) -> PathBuf {
        csv_path.with_extension("schema.json")
    }

    pub fn write(&self, csv_path: &Path) -> Result<()> {
        std::fs::write(csv_path, self.to_csv())?;
        std::fs::write(Self::sidecar_path(csv_path), self.schema_json()? + "\n")?;
        Ok(())
    }

    pub fn read(csv_path: &Path) -> Result<Self> {
        let sidecar_path = Self::sidecar_path(csv_path);
        for p in [csv_path, sidecar_path.as_path()] {
            if !p.is_file() {
                return Err(Error::MissingFile(p.to_path_buf()));
            }
        }
        let sidecar: SchemaSidecar = serde_json::from_str(&std::fs::read_to_string(&sidecar_path)?)?;
        let schema = FeatureSchema {
            names: sidecar.names,
            groups: sidecar.groups,
        };
        if schema.names.len() != schema.groups.len() || schema.fingerprint() != sidecar.fingerprint {
            return Err(Error::SchemaMismatch {
                expected: sidecar.fingerprint,
                found: schema.fingerprint(),
            });
        }

        let mut reader = csv::ReaderBuilder::new().flexible(true).from_path(csv_path)?;
        let headers = reader.headers()?.clone();
        let expected: Vec<&str> = ["id", "language", "grade"]
            .into_iter()
            .chain(schema.names.iter().map(String::as_str))
            .collect();
        if !headers.iter().eq(expected.iter().copied()) {
            return Err(Error::SchemaMismatch {
                expected: format!("{} columns per sidecar", expected.len()),
                found: format!("{} columns in header", headers.len()),
            });
        }
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let bad = |reason: String| Error::MalformedRow {
                path: csv_path.display().to_string(),
                line: i + 2,
                reason,
            };
            if record.len() != expected.len() {
                return Err(bad(format!("expected {} fields", expected.len())));
            }
            let values = record
                .iter()
                .skip(3)
                .map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| bad("non-numeric or non-finite value".into()))?;
            rows.push(FeatureRow {
                doc_id: record[0].to_string(),
                language: LanguageCode::new(&record[1])?,
                label: record[2].parse()?,
                values,
            });
        }
        Ok(FeatureMatrix { schema, rows })
    }
}

/// Switches for feature extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureOptions {
    /// Languages read without the `ng` digraph.
    pub plain_orthography: Vec<LanguageCode>,
    pub execution: Execution,
}

impl Default for FeatureOptions {
    fn default() -> Self {
        FeatureOptions {
            plain_orthography: vec![LanguageCode::new("eng").expect("valid code")],
            execution: Execution::default(),
        }
    }
}

impl FeatureOptions {
    pub fn orthography(&self, lang: &LanguageCode) -> OrthographyConfig {
        if self.plain_orthography.contains(lang) {
            OrthographyConfig::english()
        } else {
            OrthographyConfig::default()
        }
    }
}

/// Feature rows for the given documents, ordered by (language, id).
pub fn assemble_documents(
    docs: &[&Document],
    set: FeatureSet,
    profiles: Option<&ReferenceProfiles>,
    embeddings: Option<&EmbeddingTable>,
    opts: &FeatureOptions,
) -> Result<FeatureMatrix> {
    let profiles = match (set.uses(FeatureGroup::CrossNgo), profiles) {
        (true, None) => {
            return Err(Error::InvalidParameter(format!(
                "feature set {set} needs reference n-gram profiles"
            )))
        }
        (true, Some(p)) => Some(p),
        (false, _) => None,
    };
    let embeddings = match (set.uses(FeatureGroup::Emb), embeddings) {
        (true, None) => {
            return Err(Error::InvalidParameter(format!(
                "feature set {set} needs an embedding table"
            )))
        }
        (true, Some(e)) => Some(e),
        (false, _) => None,
    };

    let mut ordered: Vec<&Document> = docs.to_vec();
    ordered.sort_by(|a, b| (&a.language, &a.id).cmp(&(&b.language, &b.id)));
    let mut seen = HashSet::new();
    if let Some(dup) = ordered.iter().find(|d| !seen.insert((&d.language, &d.id))) {
        return Err(Error::DuplicateId(dup.id.clone()));
    }

    let schema = FeatureSchema::for_set(set);
    let rows = par::map(opts.execution, &ordered, |doc| -> Result<FeatureRow> {
        let mut values = Vec::with_capacity(schema.len());
        if set.uses(FeatureGroup::Trad) {
            values.extend(trad_features(doc, &opts.orthography(&doc.language))?);
        }
        if let Some(profiles) = profiles {
            values.extend(profiles.features(doc)?);
        }
        if let Some(table) = embeddings {
            let v = table
                .get(&doc.id)
                .ok_or_else(|| Error::MissingEmbedding(doc.id.clone()))?;
            values.extend_from_slice(v);
        }
        Ok(FeatureRow {
            doc_id: doc.id.clone(),
            language: doc.language.clone(),
            label: doc.grade,
            values,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(FeatureMatrix { schema, rows })
}

pub fn assemble(
    corpora: &[Corpus],
    set: FeatureSet,
    profiles: Option<&ReferenceProfiles>,
    embeddings: Option<&EmbeddingTable>,
    opts: &FeatureOptions,
) -> Result<FeatureMatrix> {
    let docs: Vec<&Document> = corpora.iter().flat_map(|c| &c.documents).collect();
    assemble_documents(&docs, set, profiles, embeddings, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::build_profile;

    fn doc(lang: &str, id: &str, text: &str) -> Document {
        Document::new(id, LanguageCode::new(lang).unwrap(), GradeLabel::new(1).unwrap(), text).unwrap()
    }

    fn profile_of(lang: &str, n: usize, grams: &[&str]) -> NgramProfile {
        NgramProfile {
            language: LanguageCode::new(lang).unwrap(),
            n,
            top_fraction: 0.25,
            entries: grams.iter().map(|g| (g.to_string(), 1)).collect(),
        }
    }

    #[test]
    fn trad_vector_for_two_word_document() {
        let d = doc("tgl", "x", "mata . tubig .");
        let v = trad_features(&d, &OrthographyConfig::default()).unwrap();
        let mut expected = [0.0; TRAD_COUNT];
        expected[..8].copy_from_slice(&[2.0, 2.0, 2.0, 4.5, 1.0, 2.0, 0.0, 0.0]);
        expected[9] = 0.75;
        expected[11] = 0.25;
        assert_eq!(v, expected);
    }

    #[test]
    fn polysyllable_boundary_is_strict() {
        let cfg = OrthographyConfig::default();
        // five syllables
        let five = trad_features(&doc("tgl", "a", "pinagbawalan"), &cfg).unwrap();
        assert_eq!(five[5], 5.0);
        assert_eq!(five[6], 0.0);
        // six syllables
        let six = trad_features(&doc("tgl", "b", "pinagbabawalan"), &cfg).unwrap();
        assert_eq!(six[5], 6.0);
        assert_eq!(six[6], 1.0);
    }

    #[test]
    fn vowel_less_words_skip_syllable_stats() {
        let v = trad_features(&doc("tgl", "a", "mata ng bata"), &OrthographyConfig::default()).unwrap();
        assert_eq!(v[0], 3.0);
        assert_eq!(v[5], 2.0);
        let err = trad_features(&doc("tgl", "b", "ng ng"), &OrthographyConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoVowel(_)));
    }

    #[test]
    fn crossngo_cases() {
        let d = doc("tgl", "x", "mata bang");
        // unique bigrams: ma at ta ba an ng
        let all = profile_of("tgl", 2, &["ma", "at", "ta", "ba", "an", "ng", "zz"]);
        let none = profile_of("bcl", 2, &["xx", "yy"]);
        let v = crossngo(&d, &[&all, &none], 2).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);

        let d = doc("tgl", "y", "mata bang");
        let some = profile_of("ceb", 2, &["ng", "ma"]);
        let v = crossngo(&d, &[&some], 2).unwrap();
        assert_eq!(v, vec![2.0 / 6.0]);

        let d = doc("tgl", "z", "a b");
        assert!(matches!(crossngo(&d, &[&some], 2), Err(Error::NoNgrams { .. })));
        assert!(crossngo(&doc("tgl", "w", "mata"), &[&some], 3).is_err());
    }

    #[test]
    fn schema_sizes() {
        assert_eq!(FeatureSchema::for_set(FeatureSet::Trad).len(), 18);
        assert_eq!(FeatureSchema::for_set(FeatureSet::TradCrossNgo).len(), 24);
        assert_eq!(FeatureSchema::for_set(FeatureSet::Emb).len(), 768);
        assert_eq!(FeatureSchema::for_set(FeatureSet::All).len(), 792);
        let s = FeatureSchema::for_set(FeatureSet::TradCrossNgo);
        assert_eq!(&s.names[18..21], ["crossngo_tgl_n2", "crossngo_bcl_n2", "crossngo_ceb_n2"]);
        assert_ne!(s.fingerprint(), FeatureSchema::for_set(FeatureSet::Trad).fingerprint());
    }

    #[test]
    fn feature_set_parsing() {
        assert_eq!("TRAD_CROSSNGO".parse::<FeatureSet>().unwrap(), FeatureSet::TradCrossNgo);
        assert_eq!("trad+crossngo".parse::<FeatureSet>().unwrap(), FeatureSet::TradCrossNgo);
        assert!("bert".parse::<FeatureSet>().is_err());
    }

    #[test]
    fn emb_requires_table() {
        let d = doc("tgl", "x", "mata");
        let err = assemble_documents(&[&d], FeatureSet::Emb, None, None, &FeatureOptions::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
        let table = EmbeddingTable::new(BTreeMap::new()).unwrap();
        let err = assemble_documents(&[&d], FeatureSet::Emb, None, Some(&table), &FeatureOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingEmbedding(_)));
    }

    #[test]
    fn reference_profiles_from_corpora() {
        let mut corpora = Vec::new();
        for lang in ["tgl", "bcl", "ceb"] {
            let d = doc(lang, "x", "ang mga bata ay masaya");
            corpora.push(Corpus::new(LanguageCode::new(lang).unwrap(), vec![d]).unwrap());
        }
        let refs = ReferenceProfiles::from_corpora(&corpora, 1.0, Execution::Sequential).unwrap();
        assert_eq!(refs.iter().count(), 6);
        let v = refs.features(&corpora[0].documents[0]).unwrap();
        assert!(v.iter().all(|&x| x == 1.0));
        assert_eq!(build_profile(&corpora[0], 2, 1.0).unwrap(), refs.iter().next().unwrap().clone());
        assert!(ReferenceProfiles::from_corpora(&corpora[..2], 1.0, Execution::Sequential).is_err());
    }
}
