//! JSON Lines ingest and write-back.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use super::{
    first_page_token, Author, Corpus, DocType, DocumentRecord, JournalRecord, RawReference,
};

const JOURNAL_KEYS: &[&str] = &[
    "journal_id",
    "issns",
    "title_history",
    "commencement_year",
    "coverage",
];
const DOCUMENT_KEYS: &[&str] = &[
    "doc_id",
    "journal_id",
    "year",
    "title",
    "authors",
    "doc_type",
    "references",
];

/// Lines may be bad up to this fraction of a file before the load aborts.
const MAX_MALFORMED_FRACTION: (usize, usize) = (1, 10);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourceFile {
    Journals,
    Documents,
}

impl fmt::Display for SourceFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SourceFile::Journals => "journals",
            SourceFile::Documents => "documents",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MalformedLine {
    pub file: SourceFile,
    /// 1-based.
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub malformed: Vec<MalformedLine>,
}

impl LoadReport {
    pub fn is_clean(&self) -> bool {
        self.malformed.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("input file not found: {}", .0.display())]
    FileMissing(PathBuf),
    #[error("{file} file: every record lacks required field `{field}`")]
    SchemaError { file: SourceFile, field: String },
    #[error("{file} file: {bad} of {total} lines malformed (limit 10%)")]
    TooManyMalformed {
        file: SourceFile,
        bad: usize,
        total: usize,
    },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Deserialize)]
struct WireReference {
    ref_index: Option<u32>,
    #[serde(default)]
    cited_author: Option<Author>,
    cited_work: String,
    #[serde(default)]
    cited_year: Option<i32>,
    #[serde(default)]
    cited_volume: Option<u32>,
    #[serde(default)]
    cited_page: Option<String>,
    #[serde(default)]
    cited_doi: Option<String>,
    #[serde(default)]
    cited_title: Option<String>,
}

#[derive(Deserialize)]
struct WireDocument {
    doc_id: String,
    journal_id: String,
    year: i32,
    #[serde(default)]
    volume: Option<u32>,
    #[serde(default)]
    first_page: Option<String>,
    #[serde(default)]
    doi: Option<String>,
    title: String,
    authors: Vec<Author>,
    doc_type: DocType,
    references: Vec<WireReference>,
}

/// Load a corpus from a journals file and a documents file.
pub fn load_corpus(
    journals_path: &Path,
    documents_path: &Path,
) -> Result<(Corpus, LoadReport), LoadError> {
    let open = |p: &Path| -> Result<BufReader<File>, LoadError> {
        match File::open(p) {
            Ok(f) => Ok(BufReader::new(f)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => {
                Err(LoadError::FileMissing(p.to_path_buf()))
            }
            Err(e) => Err(e.into()),
        }
    };
    let journals = open(journals_path)?;
    let documents = open(documents_path)?;
    read_corpus(journals, documents)
}

/// Same as [`load_corpus`] over arbitrary readers.
pub fn read_corpus<J: BufRead, D: BufRead>(
    journals: J,
    documents: D,
) -> Result<(Corpus, LoadReport), LoadError> {
    let mut report = LoadReport::default();

    let mut jmap: BTreeMap<String, JournalRecord> = BTreeMap::new();
    let jlines = read_records(journals, SourceFile::Journals, JOURNAL_KEYS)?;
    let mut jbad = jlines.bad;
    for (line, value) in jlines.good {
        let parsed = serde_json::from_value::<JournalRecord>(value)
            .map_err(|e| e.to_string())
            .and_then(|j| check_journal(&j).map(|_| j))
            .and_then(|j| {
                if jmap.contains_key(&j.journal_id) {
                    Err(format!("duplicate journal_id {}", j.journal_id))
                } else {
                    Ok(j)
                }
            });
        match parsed {
            Ok(j) => {
                jmap.insert(j.journal_id.clone(), j);
            }
            Err(reason) => jbad.push((line, reason)),
        }
    }
    check_threshold(SourceFile::Journals, jbad.len(), jlines.total)?;

    let mut dmap: BTreeMap<String, DocumentRecord> = BTreeMap::new();
    let dlines = read_records(documents, SourceFile::Documents, DOCUMENT_KEYS)?;
    let mut dbad = dlines.bad;
    for (line, value) in dlines.good {
        let parsed = serde_json::from_value::<WireDocument>(value)
            .map_err(|e| e.to_string())
            .and_then(into_document)
            .and_then(|d| {
                if !jmap.contains_key(&d.journal_id) {
                    Err(format!("unknown journal_id {}", d.journal_id))
                } else if dmap.contains_key(&d.doc_id) {
                    Err(format!("duplicate doc_id {}", d.doc_id))
                } else {
                    Ok(d)
                }
            });
        match parsed {
            Ok(d) => {
                dmap.insert(d.doc_id.clone(), d);
            }
            Err(reason) => dbad.push((line, reason)),
        }
    }
    check_threshold(SourceFile::Documents, dbad.len(), dlines.total)?;

    for (file, bad) in [(SourceFile::Journals, jbad), (SourceFile::Documents, dbad)] {
        report
            .malformed
            .extend(
                bad.into_iter()
                    .map(|(line, reason)| MalformedLine { file, line, reason }),
            );
    }
    report.malformed.sort_by_key(|m| (m.file, m.line));
    Ok((Corpus::from_maps(jmap, dmap), report))
}

struct RawLines {
    good: Vec<(usize, Value)>,
    bad: Vec<(usize, String)>,
    total: usize,
}

fn read_records<R: BufRead>(
    reader: R,
    file: SourceFile,
    required: &[&str],
) -> Result<RawLines, LoadError> {
    let mut out = RawLines {
        good: Vec::new(),
        bad: Vec::new(),
        total: 0,
    };
    // Required keys absent from every line seen so far.
    let mut always_missing: Option<BTreeSet<&str>> = None;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.total += 1;
        let lineno = i + 1;
        let value: Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                always_missing = Some(BTreeSet::new());
                out.bad.push((lineno, format!("invalid JSON: {e}")));
                continue;
            }
        };
        let Some(obj) = value.as_object() else {
            always_missing = Some(BTreeSet::new());
            out.bad.push((lineno, "record is not a JSON object".into()));
            continue;
        };
        let missing: BTreeSet<&str> = required
            .iter()
            .copied()
            .filter(|k| !obj.contains_key(*k))
            .collect();
        always_missing = Some(match always_missing {
            None => missing.clone(),
            Some(prev) => prev.intersection(&missing).copied().collect(),
        });
        if let Some(first) = missing.iter().next() {
            out.bad.push((lineno, format!("missing field `{first}`")));
        } else {
            out.good.push((lineno, value));
        }
    }
    if let Some(field) = always_missing.and_then(|s| s.into_iter().next()) {
        return Err(LoadError::SchemaError {
            file,
            field: field.to_string(),
        });
    }
    Ok(out)
}

fn check_threshold(file: SourceFile, bad: usize, total: usize) -> Result<(), LoadError> {
    let (num, den) = MAX_MALFORMED_FRACTION;
    if bad * den > total * num {
        Err(LoadError::TooManyMalformed { file, bad, total })
    } else {
        Ok(())
    }
}

fn check_journal(j: &JournalRecord) -> Result<(), String> {
    if j.journal_id.trim().is_empty() {
        return Err("empty journal_id".into());
    }
    let mut titles = j.title_history.clone();
    titles.sort_by_key(|t| t.from_year);
    for t in &titles {
        if t.from_year < j.commencement_year {
            return Err(format!(
                "title {:?} starts {} before commencement {}",
                t.title, t.from_year, j.commencement_year
            ));
        }
        if t.to_year.is_some_and(|to| to < t.from_year) {
            return Err(format!("title {:?} has an inverted year range", t.title));
        }
    }
    for pair in titles.windows(2) {
        if pair[0].to_year.is_none_or(|to| to >= pair[1].from_year) {
            return Err(format!(
                "titles {:?} and {:?} overlap",
                pair[0].title, pair[1].title
            ));
        }
    }
    for r in &j.coverage {
        if r.to_year.is_some_and(|to| to < r.from_year) {
            return Err(format!("coverage {} has an inverted range", r.from_year));
        }
    }
    for pair in j.coverage.windows(2) {
        if pair[0].to_year.is_none_or(|to| to >= pair[1].from_year) {
            return Err("coverage intervals overlap or are unsorted".into());
        }
    }
    if let Some(map) = &j.volume_year_map {
        let mut seen = BTreeMap::new();
        for vy in map {
            if let Some(prev) = seen.insert(vy.volume, vy.year) {
                if prev != vy.year {
                    return Err(format!("volume {} mapped to two years", vy.volume));
                }
            }
        }
    }
    Ok(())
}

fn into_document(w: WireDocument) -> Result<DocumentRecord, String> {
    if w.doc_id.trim().is_empty() {
        return Err("empty doc_id".into());
    }
    let mut seen = BTreeSet::new();
    let mut references = Vec::with_capacity(w.references.len());
    for (pos, r) in w.references.into_iter().enumerate() {
        if r.cited_work.trim().is_empty() {
            return Err(format!("reference {pos} has an empty cited_work"));
        }
        let ref_index = r.ref_index.unwrap_or(pos as u32);
        if !seen.insert(ref_index) {
            return Err(format!("duplicate ref_index {ref_index}"));
        }
        references.push(RawReference {
            ref_index,
            cited_author: r.cited_author,
            cited_work: r.cited_work,
            cited_year: r.cited_year,
            cited_volume: r.cited_volume,
            cited_page: r.cited_page,
            cited_doi: r.cited_doi,
            cited_title: r.cited_title,
        });
    }
    Ok(DocumentRecord {
        doc_id: w.doc_id,
        journal_id: w.journal_id,
        year: w.year,
        volume: w.volume,
        first_page: w
            .first_page
            .map(|p| first_page_token(&p))
            .filter(|p| !p.is_empty()),
        doi: w.doi,
        title: w.title,
        authors: w.authors,
        doc_type: w.doc_type,
        references,
    })
}

/// Write a corpus back out as two JSON Lines files.
pub fn write_corpus(
    corpus: &Corpus,
    journals_path: &Path,
    documents_path: &Path,
) -> io::Result<()> {
    let mut jw = BufWriter::new(File::create(journals_path)?);
    for j in corpus.journals() {
        serde_json::to_writer(&mut jw, j)?;
        jw.write_all(b"\n")?;
    }
    jw.flush()?;
    let mut dw = BufWriter::new(File::create(documents_path)?);
    for d in corpus.documents() {
        serde_json::to_writer(&mut dw, d)?;
        dw.write_all(b"\n")?;
    }
    dw.flush()
}
