use std::collections::BTreeMap;
use std::fmt;

use super::{doi_key, Corpus, CoverageStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("warning")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValidationCode {
    CoverageGap,
    DuplicateDoi,
    PreCommencement,
    VolumeYearMismatch,
}

impl ValidationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ValidationCode::CoverageGap => "COVERAGE_GAP",
            ValidationCode::DuplicateDoi => "DUPLICATE_DOI",
            ValidationCode::PreCommencement => "PRE_COMMENCEMENT",
            ValidationCode::VolumeYearMismatch => "VOLUME_YEAR_MISMATCH",
        }
    }
}

impl fmt::Display for ValidationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub severity: Severity,
    pub code: ValidationCode,
    pub subject: String,
    pub message: String,
}

/// Report-only consistency checks. Issues come back sorted by subject, then code.
pub fn validate_corpus(corpus: &Corpus) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut by_doi: BTreeMap<String, Vec<&str>> = BTreeMap::new();

    for doc in corpus.documents() {
        let journal = corpus
            .journal(&doc.journal_id)
            .expect("corpus invariant: journal exists");
        match journal.coverage_status(doc.year) {
            CoverageStatus::PreCommencement => issues.push(ValidationIssue {
                severity: Severity::Warning,
                code: ValidationCode::PreCommencement,
                subject: doc.doc_id.clone(),
                message: format!(
                    "dated {} but {} commenced {}",
                    doc.year, journal.journal_id, journal.commencement_year
                ),
            }),
            CoverageStatus::Gap => issues.push(ValidationIssue {
                severity: Severity::Warning,
                code: ValidationCode::CoverageGap,
                subject: doc.doc_id.clone(),
                message: format!(
                    "dated {} outside the indexed coverage of {}",
                    doc.year, journal.journal_id
                ),
            }),
            CoverageStatus::Covered => {}
        }
        if let Some(vol) = doc.volume {
            if let Some(expected) = journal.year_for_volume(vol).filter(|y| *y != doc.year) {
                issues.push(ValidationIssue {
                    severity: Severity::Warning,
                    code: ValidationCode::VolumeYearMismatch,
                    subject: doc.doc_id.clone(),
                    message: format!(
                        "volume {vol} belongs to {expected}, document dated {}",
                        doc.year
                    ),
                });
            }
        }
        if let Some(doi) = doc.doi.as_deref().filter(|d| !d.trim().is_empty()) {
            by_doi.entry(doi_key(doi)).or_default().push(&doc.doc_id);
        }
    }

    for (doi, ids) in by_doi {
        if ids.len() > 1 {
            issues.push(ValidationIssue {
                severity: Severity::Warning,
                code: ValidationCode::DuplicateDoi,
                subject: ids[0].to_string(),
                message: format!("doi {doi} shared by {}", ids.join(";")),
            });
        }
    }

    issues.sort_by(|a, b| (&a.subject, a.code).cmp(&(&b.subject, b.code)));
    issues
}
