//! Corpus data model: journals, documents and their as-cited references.
//!
//! A [`Corpus`] is immutable once built. Every lookup index it carries is a
//! pure function of the journal and document records, so two corpora with the
//! same records compare equal regardless of how they were assembled.

mod dedupe;
mod load;
mod validate;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dedupe::{dedupe_documents, MergeConflict, MergeReport, MergedGroup};
pub use load::{
    load_corpus, read_corpus, write_corpus, LoadError, LoadReport, MalformedLine, SourceFile,
};
pub use validate::{validate_corpus, Severity, ValidationCode, ValidationIssue};

/// A `(title, from_year, to_year)` entry of a journal's naming history.
/// `to_year = None` means the title is still in use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TitleSpan {
    pub title: String,
    pub from_year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_year: Option<i32>,
}

impl TitleSpan {
    pub fn contains(&self, year: i32) -> bool {
        year >= self.from_year && self.to_year.is_none_or(|to| year <= to)
    }
}

/// An inclusive range of indexed years. Gaps between ranges are suspensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearRange {
    pub from_year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to_year: Option<i32>,
}

impl YearRange {
    pub fn new(from_year: i32, to_year: i32) -> Self {
        YearRange {
            from_year,
            to_year: Some(to_year),
        }
    }

    pub fn contains(&self, year: i32) -> bool {
        year >= self.from_year && self.to_year.is_none_or(|to| year <= to)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolumeYear {
    pub volume: u32,
    pub year: i32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRecord {
    pub journal_id: String,
    #[serde(default)]
    pub issns: Vec<String>,
    pub title_history: Vec<TitleSpan>,
    pub commencement_year: i32,
    #[serde(default)]
    pub coverage: Vec<YearRange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume_year_map: Option<Vec<VolumeYear>>,
}

/// Where a year sits relative to a journal's indexed coverage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverageStatus {
    Covered,
    PreCommencement,
    Gap,
}

impl JournalRecord {
    /// Journals without coverage data are treated as continuously indexed
    /// from their commencement year.
    pub fn coverage_status(&self, year: i32) -> CoverageStatus {
        if year < self.commencement_year {
            CoverageStatus::PreCommencement
        } else if self.coverage.is_empty() || self.coverage.iter().any(|r| r.contains(year)) {
            CoverageStatus::Covered
        } else {
            CoverageStatus::Gap
        }
    }

    pub fn year_for_volume(&self, volume: u32) -> Option<i32> {
        self.volume_year_map
            .as_ref()?
            .iter()
            .find(|vy| vy.volume == volume)
            .map(|vy| vy.year)
    }

    /// True when the map knows `volume` and assigns it a different year.
    pub fn volume_contradicts(&self, volume: u32, year: i32) -> bool {
        self.year_for_volume(volume).is_some_and(|y| y != year)
    }

    pub fn titles(&self) -> impl Iterator<Item = &str> {
        self.title_history.iter().map(|t| t.title.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Author {
    pub surname: String,
    #[serde(default)]
    pub initials: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocType {
    Article,
    Review,
    Editorial,
    Letter,
    Correction,
    News,
    Other,
}

impl DocType {
    /// Articles and reviews are the citable items.
    pub fn is_citable(self) -> bool {
        matches!(self, DocType::Article | DocType::Review)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DocType::Article => "article",
            DocType::Review => "review",
            DocType::Editorial => "editorial",
            DocType::Letter => "letter",
            DocType::Correction => "correction",
            DocType::News => "news",
            DocType::Other => "other",
        }
    }
}

/// One reference exactly as the citing document printed it. Fields are never
/// rewritten; matching normalizes copies.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RawReference {
    pub ref_index: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_author: Option<Author>,
    pub cited_work: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_volume: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_page: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_doi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cited_title: Option<String>,
}

impl RawReference {
    /// Equality on everything but the list position.
    pub(crate) fn same_content(&self, other: &RawReference) -> bool {
        self.cited_author == other.cited_author
            && self.cited_work == other.cited_work
            && self.cited_year == other.cited_year
            && self.cited_volume == other.cited_volume
            && self.cited_page == other.cited_page
            && self.cited_doi == other.cited_doi
            && self.cited_title == other.cited_title
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentRecord {
    pub doc_id: String,
    pub journal_id: String,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_page: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doi: Option<String>,
    #[serde(default)]
    pub title: String,
    #[serde(default)]
    pub authors: Vec<Author>,
    pub doc_type: DocType,
    #[serde(default)]
    pub references: Vec<RawReference>,
}

impl DocumentRecord {
    pub fn is_citable(&self) -> bool {
        self.doc_type.is_citable()
    }

    pub fn first_author_surname(&self) -> Option<&str> {
        self.authors.first().map(|a| a.surname.as_str())
    }

    /// Count of populated bibliographic fields; used to pick merge survivors.
    pub fn filled_fields(&self) -> usize {
        [
            self.volume.is_some(),
            self.first_page
                .as_deref()
                .is_some_and(|p| !p.trim().is_empty()),
            self.doi.as_deref().is_some_and(|d| !d.trim().is_empty()),
            !self.title.trim().is_empty(),
            !self.authors.is_empty(),
        ]
        .into_iter()
        .filter(|f| *f)
        .count()
    }
}

/// Reduce a page field to its first token: `"13-31"` becomes `"13"`.
pub fn first_page_token(raw: &str) -> String {
    raw.trim()
        .split(['-', '\u{2013}'])
        .next()
        .unwrap_or("")
        .trim()
        .to_string()
}

/// Comparison key for page fields: first token, leading zeros dropped,
/// uppercased so article numbers like `e9171` and `E9171` agree.
pub fn page_key(raw: &str) -> String {
    let token = first_page_token(raw);
    let stripped = token.trim_start_matches('0');
    let key = if stripped.is_empty() && !token.is_empty() {
        "0"
    } else {
        stripped
    };
    key.to_uppercase()
}

/// Comparison key for DOIs: resolver prefixes removed, lowercased.
pub fn doi_key(raw: &str) -> String {
    let mut s = raw.trim();
    for prefix in [
        "https://doi.org/",
        "http://doi.org/",
        "https://dx.doi.org/",
        "http://dx.doi.org/",
    ] {
        if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
            s = &s[prefix.len()..];
        }
    }
    for prefix in ["doi:", "doi "] {
        if s.len() >= prefix.len() && s[..prefix.len()].eq_ignore_ascii_case(prefix) {
            s = s[prefix.len()..].trim_start();
        }
    }
    s.to_lowercase()
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CorpusError {
    #[error("document {doc_id} references unknown journal {journal_id}")]
    UnknownJournal { doc_id: String, journal_id: String },
    #[error("duplicate journal id {0}")]
    DuplicateJournal(String),
    #[error("duplicate document id {0}")]
    DuplicateDocument(String),
}

type DocKey = (String, i32, u32, String);

/// Derived lookups. Every list is sorted by doc_id.
#[derive(Debug, Clone, Default)]
pub struct CorpusIndex {
    by_doi: HashMap<String, Vec<String>>,
    by_journal: HashMap<String, Vec<String>>,
    by_journal_year: HashMap<(String, i32), Vec<String>>,
    by_journal_volume: HashMap<(String, u32), Vec<String>>,
    by_key: HashMap<DocKey, Vec<String>>,
}

impl CorpusIndex {
    fn build(documents: &BTreeMap<String, DocumentRecord>) -> Self {
        let mut idx = CorpusIndex::default();
        // BTreeMap iteration is in doc_id order, so every list stays sorted.
        for doc in documents.values() {
            let id = doc.doc_id.clone();
            if let Some(doi) = doc.doi.as_deref().filter(|d| !d.trim().is_empty()) {
                idx.by_doi.entry(doi_key(doi)).or_default().push(id.clone());
            }
            idx.by_journal
                .entry(doc.journal_id.clone())
                .or_default()
                .push(id.clone());
            idx.by_journal_year
                .entry((doc.journal_id.clone(), doc.year))
                .or_default()
                .push(id.clone());
            if let Some(vol) = doc.volume {
                idx.by_journal_volume
                    .entry((doc.journal_id.clone(), vol))
                    .or_default()
                    .push(id.clone());
                if let Some(page) = doc.first_page.as_deref() {
                    idx.by_key
                        .entry((doc.journal_id.clone(), doc.year, vol, page_key(page)))
                        .or_default()
                        .push(id);
                }
            }
        }
        idx
    }
}

/// Journals and documents plus derived lookup indexes.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    journals: BTreeMap<String, JournalRecord>,
    documents: BTreeMap<String, DocumentRecord>,
    index: CorpusIndex,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.journals == other.journals && self.documents == other.documents
    }
}

impl Eq for Corpus {}

impl Corpus {
    pub fn new(
        journals: impl IntoIterator<Item = JournalRecord>,
        documents: impl IntoIterator<Item = DocumentRecord>,
    ) -> Result<Self, CorpusError> {
        let mut jmap = BTreeMap::new();
        for j in journals {
            if jmap.contains_key(&j.journal_id) {
                return Err(CorpusError::DuplicateJournal(j.journal_id));
            }
            jmap.insert(j.journal_id.clone(), j);
        }
        let mut dmap = BTreeMap::new();
        for d in documents {
            if !jmap.contains_key(&d.journal_id) {
                return Err(CorpusError::UnknownJournal {
                    doc_id: d.doc_id,
                    journal_id: d.journal_id,
                });
            }
            if dmap.contains_key(&d.doc_id) {
                return Err(CorpusError::DuplicateDocument(d.doc_id));
            }
            dmap.insert(d.doc_id.clone(), d);
        }
        Ok(Self::from_maps(jmap, dmap))
    }

    pub(crate) fn from_maps(
        journals: BTreeMap<String, JournalRecord>,
        documents: BTreeMap<String, DocumentRecord>,
    ) -> Self {
        let index = CorpusIndex::build(&documents);
        Corpus {
            journals,
            documents,
            index,
        }
    }

    pub fn journals(&self) -> impl ExactSizeIterator<Item = &JournalRecord> {
        self.journals.values()
    }

    /// Documents in doc_id order.
    pub fn documents(&self) -> impl ExactSizeIterator<Item = &DocumentRecord> {
        self.documents.values()
    }

    pub fn journal(&self, id: &str) -> Option<&JournalRecord> {
        self.journals.get(id)
    }

    pub fn document(&self, id: &str) -> Option<&DocumentRecord> {
        self.documents.get(id)
    }

    pub fn journal_count(&self) -> usize {
        self.journals.len()
    }

    pub fn document_count(&self) -> usize {
        self.documents.len()
    }

    pub fn reference_count(&self) -> usize {
        self.documents.values().map(|d| d.references.len()).sum()
    }

    pub fn docs_by_doi(&self, doi: &str) -> &[String] {
        self.index
            .by_doi
            .get(&doi_key(doi))
            .map_or(&[], Vec::as_slice)
    }

    pub fn docs_in_journal(&self, journal_id: &str) -> &[String] {
        self.index
            .by_journal
            .get(journal_id)
            .map_or(&[], Vec::as_slice)
    }

    pub fn docs_in_journal_year(&self, journal_id: &str, year: i32) -> &[String] {
        self.index
            .by_journal_year
            .get(&(journal_id.to_string(), year))
            .map_or(&[], Vec::as_slice)
    }

    pub fn docs_in_journal_volume(&self, journal_id: &str, volume: u32) -> &[String] {
        self.index
            .by_journal_volume
            .get(&(journal_id.to_string(), volume))
            .map_or(&[], Vec::as_slice)
    }

    /// Documents matching `(journal, year, volume, first page)` exactly.
    pub fn docs_by_key(&self, journal_id: &str, year: i32, volume: u32, page: &str) -> &[String] {
        self.index
            .by_key
            .get(&(journal_id.to_string(), year, volume, page_key(page)))
            .map_or(&[], Vec::as_slice)
    }

    pub(crate) fn into_parts(
        self,
    ) -> (
        BTreeMap<String, JournalRecord>,
        BTreeMap<String, DocumentRecord>,
    ) {
        (self.journals, self.documents)
    }
}
