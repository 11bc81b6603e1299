use std::fmt;

use crate::corpus::{Corpus, CoverageStatus};

use super::lineage::JournalScope;
use super::{IndexError, IndexVariantSpec, SuspensionPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RepairAction {
    /// Citations to the cohort year are removed from the numerator.
    DropCitations,
    /// The cohort year's documents are counted in the denominator.
    IncludeDocuments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum RepairReason {
    /// The journal was not indexed that year.
    CoverageGap,
    /// Citations point at a year with no counted documents.
    NoDocuments,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Repair {
    pub year: i32,
    pub action: RepairAction,
    pub reason: RepairReason,
}

impl fmt::Display for Repair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let action = match self.action {
            RepairAction::DropCitations => "drop-citations",
            RepairAction::IncludeDocuments => "include-documents",
        };
        let reason = match self.reason {
            RepairReason::CoverageGap => "coverage-gap",
            RepairReason::NoDocuments => "no-documents",
        };
        write!(f, "{}:{action}:{reason}", self.year)
    }
}

/// Repairs needed so that the cohort years feeding the numerator are the
/// cohort years feeding the denominator, for years the journal was not indexed.
///
/// Years before commencement are not gaps; citations to them are handled by
/// the general no-documents rule in the index computation.
pub fn check_window_consistency(
    scope: &JournalScope,
    spec: &IndexVariantSpec,
    corpus: &Corpus,
) -> Result<Vec<Repair>, IndexError> {
    let mut repairs = Vec::new();
    for year in spec.window() {
        if scope.record.coverage_status(year) != CoverageStatus::Gap {
            continue;
        }
        match spec.suspension_policy {
            SuspensionPolicy::Ignore => {}
            SuspensionPolicy::OmitCitations => repairs.push(Repair {
                year,
                action: RepairAction::DropCitations,
                reason: RepairReason::CoverageGap,
            }),
            SuspensionPolicy::IncludeDocuments => {
                let any = scope
                    .members
                    .iter()
                    .any(|m| !corpus.docs_in_journal_year(m, year).is_empty());
                if !any {
                    return Err(IndexError::MissingDocuments {
                        journal_id: scope.id().to_string(),
                        year,
                    });
                }
                repairs.push(Repair {
                    year,
                    action: RepairAction::IncludeDocuments,
                    reason: RepairReason::CoverageGap,
                });
            }
        }
    }
    Ok(repairs)
}
