//! Anomaly and manipulation checks over a resolved corpus.
//!
//! Rate checks (self-citation share, editorial share of the numerator, the
//! citing journal's own error rate) fire at or above a configurable threshold.
//! Record checks (citations to years a journal did not exist or was not
//! indexed, volume/year contradictions, test-record residue, repeated targets)
//! fire on any occurrence.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::corpus::{Corpus, CoverageStatus, RawReference};
use crate::indices::{
    title_matched_citations, IndexInputs, IndexVariantSpec, JournalScope, NumeratorMode, SelfCites,
};
use crate::resolver::{MatchClass, ResolutionConfig, ResolvedLink};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AuditCode {
    SelfCitationHigh,
    EditorialNumerator,
    PreCommencementCite,
    VolumeYearMismatch,
    TestArtifact,
    GhostHeavyCiter,
    DuplicateTarget,
}

impl AuditCode {
    pub fn as_str(self) -> &'static str {
        match self {
            AuditCode::SelfCitationHigh => "SELF_CITATION_HIGH",
            AuditCode::EditorialNumerator => "EDITORIAL_NUMERATOR",
            AuditCode::PreCommencementCite => "PRE_COMMENCEMENT_CITE",
            AuditCode::VolumeYearMismatch => "VOLUME_YEAR_MISMATCH",
            AuditCode::TestArtifact => "TEST_ARTIFACT",
            AuditCode::GhostHeavyCiter => "GHOST_HEAVY_CITER",
            AuditCode::DuplicateTarget => "DUPLICATE_TARGET",
        }
    }

    /// Rate flags compared against a threshold; these drive `--strict`.
    pub fn is_threshold(self) -> bool {
        matches!(
            self,
            AuditCode::SelfCitationHigh
                | AuditCode::EditorialNumerator
                | AuditCode::GhostHeavyCiter
        )
    }
}

impl fmt::Display for AuditCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditFlag {
    pub code: AuditCode,
    pub subject: String,
    /// A rate in [0, 1] for threshold flags, an occurrence count otherwise.
    pub magnitude: Rational64,
    pub detail: String,
    /// Link keys (`doc#ref`) or record ids backing the flag.
    pub evidence: Vec<String>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AuditError {
    #[error("no verified citations to {0} in the window")]
    EmptyCitationSet(String),
    #[error("{0} makes no references")]
    NoOutgoingReferences(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditConfig {
    pub self_citation_threshold: Rational64,
    pub editorial_threshold: Rational64,
    pub citing_error_threshold: Rational64,
    /// Cited-work names that mark leftover test records.
    pub artifact_denylist: Vec<String>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig {
            self_citation_threshold: Rational64::new(1, 5),
            editorial_threshold: Rational64::new(1, 4),
            citing_error_threshold: Rational64::new(1, 4),
            artifact_denylist: vec!["TEST".to_string()],
        }
    }
}

/// Census year and window the rate checks look at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusWindow {
    pub census_year: i32,
    pub window_years: u32,
}

impl CensusWindow {
    fn spec(&self) -> IndexVariantSpec {
        IndexVariantSpec::new(self.census_year)
            .with_window(self.window_years)
            .with_numerator(NumeratorMode::MM)
            .with_self_cites(SelfCites::Include)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelfCitationReport {
    pub rate: Rational64,
    pub self_citations: u64,
    pub total: u64,
    /// `(citing journal, citations)`, most citations first.
    pub by_source: Vec<(String, u64)>,
    pub flag: Option<AuditFlag>,
}

pub fn self_citation_rate(self_citations: u64, total: u64) -> Option<Rational64> {
    (total > 0).then(|| Rational64::new(self_citations as i64, total as i64))
}

pub fn self_citation_report(
    scope: &JournalScope,
    inputs: &IndexInputs,
    window: CensusWindow,
    cfg: &AuditConfig,
) -> Result<SelfCitationReport, AuditError> {
    let years = window.spec().window();
    let count_incomplete = inputs.resolution.count_incomplete_in_g11;
    let mut by_source: BTreeMap<&str, u64> = BTreeMap::new();
    let mut self_keys = Vec::new();
    for m in &scope.members {
        for id in inputs.corpus.docs_in_journal(m) {
            let target = inputs.corpus.document(id).expect("indexed doc");
            if !years.contains(&target.year) {
                continue;
            }
            for l in inputs
                .links_to(id)
                .filter(|l| l.is_verified(count_incomplete))
            {
                let Some(citing) = inputs.corpus.document(&l.citing_doc_id) else {
                    continue;
                };
                if citing.year != window.census_year {
                    continue;
                }
                *by_source.entry(citing.journal_id.as_str()).or_default() += 1;
                if scope.contains(&citing.journal_id) {
                    self_keys.push(l.key());
                }
            }
        }
    }
    let total: u64 = by_source.values().sum();
    let self_citations = self_keys.len() as u64;
    let rate = self_citation_rate(self_citations, total)
        .ok_or_else(|| AuditError::EmptyCitationSet(scope.id().to_string()))?;
    let mut by_source: Vec<(String, u64)> = by_source
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    by_source.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    self_keys.sort();
    let flag = (rate >= cfg.self_citation_threshold).then(|| AuditFlag {
        code: AuditCode::SelfCitationHigh,
        subject: scope.id().to_string(),
        magnitude: rate,
        detail: format!("{self_citations} of {total} verified citations are self-citations"),
        evidence: self_keys,
    });
    Ok(SelfCitationReport {
        rate,
        self_citations,
        total,
        by_source,
        flag,
    })
}

/// Share of the title-matched numerator that comes from non-citable items
/// (editorials, letters, news).
pub fn editorial_contribution(
    scope: &JournalScope,
    inputs: &IndexInputs,
    window: CensusWindow,
    cfg: &AuditConfig,
) -> Result<(Rational64, Option<AuditFlag>), AuditError> {
    let matched = title_matched_citations(scope, inputs, &window.spec());
    if matched.is_empty() {
        return Err(AuditError::EmptyCitationSet(scope.id().to_string()));
    }
    let mut editorial: Vec<String> = matched
        .iter()
        .filter(|c| !c.citing.is_citable())
        .map(|c| c.key())
        .collect();
    editorial.sort();
    let share = Rational64::new(editorial.len() as i64, matched.len() as i64);
    let flag = (share >= cfg.editorial_threshold).then(|| AuditFlag {
        code: AuditCode::EditorialNumerator,
        subject: scope.id().to_string(),
        magnitude: share,
        detail: format!(
            "{} of {} numerator citations come from non-citable items",
            editorial.len(),
            matched.len()
        ),
        evidence: editorial,
    });
    Ok((share, flag))
}

/// Fraction of a journal's outgoing references that are Ghost or Faulty.
pub fn citing_error_rate(
    scope: &JournalScope,
    corpus: &Corpus,
    links: &[ResolvedLink],
    cfg: &AuditConfig,
) -> Result<(Rational64, Option<AuditFlag>), AuditError> {
    let mut total = 0i64;
    let mut bad = Vec::new();
    for l in links {
        let Some(citing) = corpus.document(&l.citing_doc_id) else {
            continue;
        };
        if !scope.contains(&citing.journal_id) {
            continue;
        }
        total += 1;
        if l.match_class.is_error() {
            bad.push(l.key());
        }
    }
    if total == 0 {
        return Err(AuditError::NoOutgoingReferences(scope.id().to_string()));
    }
    let rate = Rational64::new(bad.len() as i64, total);
    let flag = (rate >= cfg.citing_error_threshold).then(|| AuditFlag {
        code: AuditCode::GhostHeavyCiter,
        subject: scope.id().to_string(),
        magnitude: rate,
        detail: format!(
            "{} of {total} outgoing references are ghost or faulty",
            bad.len()
        ),
        evidence: bad,
    });
    Ok((rate, flag))
}

fn reference_for<'c>(corpus: &'c Corpus, link: &ResolvedLink) -> Option<&'c RawReference> {
    corpus
        .document(&link.citing_doc_id)?
        .references
        .iter()
        .find(|r| r.ref_index == link.ref_index)
}

/// Per-reference date checks plus test-record residue, grouped into one flag
/// per (code, subject).
pub fn temporal_anomalies(
    corpus: &Corpus,
    links: &[ResolvedLink],
    resolution: &ResolutionConfig,
    cfg: &AuditConfig,
) -> Vec<AuditFlag> {
    let denylist: BTreeSet<String> = cfg
        .artifact_denylist
        .iter()
        .map(|d| resolution.normalize(d))
        .collect();
    let mut grouped: BTreeMap<(AuditCode, String), Vec<String>> = BTreeMap::new();
    for l in links {
        let Some(r) = reference_for(corpus, l) else {
            continue;
        };
        let journal_id = l
            .target_doc_id
            .as_deref()
            .and_then(|t| corpus.document(t))
            .map(|d| d.journal_id.as_str())
            .or(l.target_journal_id.as_deref());
        if let Some(journal) = journal_id.and_then(|j| corpus.journal(j)) {
            if let Some(year) = r.cited_year {
                if journal.coverage_status(year) != CoverageStatus::Covered {
                    grouped
                        .entry((AuditCode::PreCommencementCite, journal.journal_id.clone()))
                        .or_default()
                        .push(l.key());
                }
                if r.cited_volume
                    .is_some_and(|v| journal.volume_contradicts(v, year))
                {
                    grouped
                        .entry((AuditCode::VolumeYearMismatch, journal.journal_id.clone()))
                        .or_default()
                        .push(l.key());
                }
            }
        }
        if l.match_class.is_error() && denylist.contains(&resolution.normalize(&r.cited_work)) {
            grouped
                .entry((AuditCode::TestArtifact, l.citing_doc_id.clone()))
                .or_default()
                .push(l.key());
        }
    }
    grouped
        .into_iter()
        .map(|((code, subject), mut evidence)| {
            evidence.sort();
            let detail = match code {
                AuditCode::PreCommencementCite => {
                    format!(
                        "{} citations to years {subject} was not indexed",
                        evidence.len()
                    )
                }
                AuditCode::VolumeYearMismatch => {
                    format!(
                        "{} citations with a volume/year pair {subject} never published",
                        evidence.len()
                    )
                }
                _ => format!("{} references to a denylisted test work", evidence.len()),
            };
            AuditFlag {
                code,
                subject,
                magnitude: Rational64::from_integer(evidence.len() as i64),
                detail,
                evidence,
            }
        })
        .collect()
}

/// One citing document resolving several references to the same target.
pub fn duplicate_targets(links: &[ResolvedLink]) -> Vec<AuditFlag> {
    let mut seen: BTreeMap<(&str, &str), Vec<String>> = BTreeMap::new();
    for l in links {
        if let Some(t) = l.target_doc_id.as_deref() {
            seen.entry((&l.citing_doc_id, t)).or_default().push(l.key());
        }
    }
    seen.into_iter()
        .filter(|(_, keys)| keys.len() > 1)
        .map(|((citing, target), evidence)| AuditFlag {
            code: AuditCode::DuplicateTarget,
            subject: citing.to_string(),
            magnitude: Rational64::from_integer(evidence.len() as i64),
            detail: format!("{} references resolve to {target}", evidence.len()),
            evidence,
        })
        .collect()
}

/// Per-journal rates, `None` where undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalAudit {
    pub journal_id: String,
    pub self_citation_rate: Option<Rational64>,
    pub editorial_share: Option<Rational64>,
    pub citing_error_rate: Option<Rational64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub journals: Vec<JournalAudit>,
    /// Sorted by code, then subject.
    pub flags: Vec<AuditFlag>,
}

impl AuditReport {
    pub fn threshold_breached(&self) -> bool {
        self.flags.iter().any(|f| f.code.is_threshold())
    }
}

pub fn run_audit(
    scopes: &[JournalScope],
    inputs: &IndexInputs,
    window: Option<CensusWindow>,
    cfg: &AuditConfig,
) -> AuditReport {
    let mut report = AuditReport::default();
    for scope in scopes.iter().filter(|_| window.is_some()) {
        let window = window.expect("filtered");
        let self_cites = self_citation_report(scope, inputs, window, cfg).ok();
        let editorial = editorial_contribution(scope, inputs, window, cfg).ok();
        let errors = citing_error_rate(scope, inputs.corpus, inputs.links, cfg).ok();
        report.journals.push(JournalAudit {
            journal_id: scope.id().to_string(),
            self_citation_rate: self_cites.as_ref().map(|s| s.rate),
            editorial_share: editorial.as_ref().map(|e| e.0),
            citing_error_rate: errors.as_ref().map(|e| e.0),
        });
        report.flags.extend(
            [
                self_cites.and_then(|s| s.flag),
                editorial.and_then(|e| e.1),
                errors.and_then(|e| e.1),
            ]
            .into_iter()
            .flatten(),
        );
    }
    report.flags.extend(temporal_anomalies(
        inputs.corpus,
        inputs.links,
        inputs.resolution,
        cfg,
    ));
    report.flags.extend(duplicate_targets(inputs.links));
    report
        .flags
        .sort_by(|a, b| (a.code, &a.subject, &a.detail).cmp(&(b.code, &b.subject, &b.detail)));
    report
}

/// Links grouped by match class, for summaries.
pub fn class_counts(links: &[ResolvedLink]) -> HashMap<MatchClass, usize> {
    let mut out = HashMap::new();
    for l in links {
        *out.entry(l.match_class).or_default() += 1;
    }
    out
}
