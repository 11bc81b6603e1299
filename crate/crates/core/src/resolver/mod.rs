//! Reference resolution.
//!
//! Every as-cited reference is judged against the corpus and lands in exactly
//! one of four classes, crossing (in)complete with (in)correct:
//!
//! | class               | target document | fields                         |
//! |---------------------|-----------------|--------------------------------|
//! | `CompleteCorrect`   | yes             | all present fields agree        |
//! | `IncompleteCorrect` | yes             | title close, one field missing  |
//! | `Faulty`            | doc or journal  | fields contradict the target    |
//! | `Ghost`             | no              | nothing in the corpus fits      |
//!
//! Rules run in order: DOI, exact fields, fuzzy title, journal-level
//! contradiction, ghost. The first rule that fires decides the class.

mod normalize;

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{doi_key, page_key, Corpus, CoverageStatus, DocumentRecord, RawReference};

pub use normalize::normalize_work_title;
pub(crate) use normalize::{bounded_distance, edit_distance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatchClass {
    CompleteCorrect,
    IncompleteCorrect,
    Faulty,
    Ghost,
}

impl MatchClass {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchClass::CompleteCorrect => "CompleteCorrect",
            MatchClass::IncompleteCorrect => "IncompleteCorrect",
            MatchClass::Faulty => "Faulty",
            MatchClass::Ghost => "Ghost",
        }
    }

    /// Ghost and Faulty links point at nothing real.
    pub fn is_error(self) -> bool {
        matches!(self, MatchClass::Faulty | MatchClass::Ghost)
    }
}

impl fmt::Display for MatchClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
#[error("unknown match class {0:?}")]
pub struct ParseMatchClassError(String);

impl FromStr for MatchClass {
    type Err = ParseMatchClassError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "CompleteCorrect" => MatchClass::CompleteCorrect,
            "IncompleteCorrect" => MatchClass::IncompleteCorrect,
            "Faulty" => MatchClass::Faulty,
            "Ghost" => MatchClass::Ghost,
            other => return Err(ParseMatchClassError(other.to_string())),
        })
    }
}

/// How one field of a reference compares with the chosen target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evidence {
    Exact,
    Near,
    Mismatch,
    #[default]
    Absent,
}

impl Evidence {
    fn agrees(self) -> bool {
        matches!(self, Evidence::Exact | Evidence::Near)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FieldEvidence {
    pub doi: Evidence,
    pub title: Evidence,
    pub year: Evidence,
    pub volume: Evidence,
    pub page: Evidence,
    /// Candidates sharing the winning rank; above 1 means a tie was broken by doc_id.
    pub tied_candidates: u32,
}

const WEIGHT_DOI: i64 = 40;
const WEIGHT_TITLE: i64 = 25;
const WEIGHT_YEAR: i64 = 15;
const WEIGHT_VOLUME: i64 = 10;
const WEIGHT_PAGE: i64 = 10;

impl FieldEvidence {
    fn weighted(&self) -> [(Evidence, i64); 5] {
        [
            (self.doi, WEIGHT_DOI),
            (self.title, WEIGHT_TITLE),
            (self.year, WEIGHT_YEAR),
            (self.volume, WEIGHT_VOLUME),
            (self.page, WEIGHT_PAGE),
        ]
    }

    /// Weighted share of agreeing fields; absent fields drop out of both sides.
    pub fn score(&self) -> Rational64 {
        let (mut hit, mut present) = (0, 0);
        for (e, w) in self.weighted() {
            if e != Evidence::Absent {
                present += w;
                if e.agrees() {
                    hit += w;
                }
            }
        }
        if present == 0 {
            Rational64::from_integer(0)
        } else {
            Rational64::new(hit, present)
        }
    }

    fn all_present_agree(&self) -> bool {
        self.weighted()
            .iter()
            .all(|(e, _)| matches!(e, Evidence::Absent) || e.agrees())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedLink {
    pub citing_doc_id: String,
    pub ref_index: u32,
    pub target_doc_id: Option<String>,
    /// Set only when a journal was identified but no document was.
    pub target_journal_id: Option<String>,
    pub match_class: MatchClass,
    pub score: Rational64,
    pub field_evidence: FieldEvidence,
}

impl ResolvedLink {
    /// Cited-side verified: points at a real document through correct fields.
    pub fn is_verified(&self, count_incomplete: bool) -> bool {
        match self.match_class {
            MatchClass::CompleteCorrect => true,
            MatchClass::IncompleteCorrect => count_incomplete,
            _ => false,
        }
    }

    /// `citing_doc_id#ref_index`, the id used in report evidence columns.
    pub fn key(&self) -> String {
        format!("{}#{}", self.citing_doc_id, self.ref_index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolutionConfig {
    pub title_edit_distance_max: usize,
    pub truncation_length: usize,
    pub count_incomplete_in_g11: bool,
    pub doi_overrides_fields: bool,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            title_edit_distance_max: 2,
            truncation_length: 20,
            count_incomplete_in_g11: true,
            doi_overrides_fields: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("truncation_length must be at least 1")]
    TruncationTooShort,
}

impl ResolutionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.truncation_length == 0 {
            return Err(ConfigError::TruncationTooShort);
        }
        Ok(())
    }

    pub fn normalize(&self, title: &str) -> String {
        normalize_work_title(title, self.truncation_length)
    }
}

/// A journal whose title is within the configured distance of a cited work.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct TitleHit<'c> {
    journal_id: &'c str,
    distance: usize,
}

/// Resolves references against one corpus under one configuration.
pub struct Resolver<'c> {
    corpus: &'c Corpus,
    cfg: ResolutionConfig,
    journal_titles: Vec<(&'c str, Vec<String>)>,
    title_cache: HashMap<String, Vec<TitleHit<'c>>>,
}

struct Candidate<'c> {
    doc: &'c DocumentRecord,
    evidence: FieldEvidence,
    score: Rational64,
    distance: usize,
}

impl<'c> Resolver<'c> {
    pub fn new(corpus: &'c Corpus, cfg: ResolutionConfig) -> Self {
        let journal_titles = corpus
            .journals()
            .map(|j| {
                let mut titles: Vec<String> = j.titles().map(|t| cfg.normalize(t)).collect();
                titles.sort();
                titles.dedup();
                (j.journal_id.as_str(), titles)
            })
            .collect();
        Resolver {
            corpus,
            cfg,
            journal_titles,
            title_cache: HashMap::new(),
        }
    }

    /// Precompute title matches for every distinct cited work in the corpus.
    pub fn with_corpus_cache(mut self) -> Self {
        let works: HashSet<String> = self
            .corpus
            .documents()
            .flat_map(|d| d.references.iter())
            .map(|r| self.cfg.normalize(&r.cited_work))
            .collect();
        let works: Vec<String> = works.into_iter().collect();
        let hits: Vec<(String, Vec<TitleHit<'c>>)> = works
            .into_par_iter()
            .map(|w| {
                let h = self.compute_title_hits(&w);
                (w, h)
            })
            .collect();
        self.title_cache = hits.into_iter().collect();
        self
    }

    pub fn config(&self) -> &ResolutionConfig {
        &self.cfg
    }

    fn compute_title_hits(&self, work: &str) -> Vec<TitleHit<'c>> {
        let max = self.cfg.title_edit_distance_max;
        // journal_titles is in journal_id order, so hits are too.
        self.journal_titles
            .iter()
            .filter_map(|(id, titles)| {
                titles
                    .iter()
                    .filter_map(|t| bounded_distance(work, t, max))
                    .min()
                    .map(|distance| TitleHit {
                        journal_id: id,
                        distance,
                    })
            })
            .collect()
    }

    fn title_hits(&self, work: &str) -> std::borrow::Cow<'_, [TitleHit<'c>]> {
        match self.title_cache.get(work) {
            Some(h) => std::borrow::Cow::Borrowed(h),
            None => std::borrow::Cow::Owned(self.compute_title_hits(work)),
        }
    }

    fn journal_distance(&self, work: &str, journal_id: &str) -> Option<usize> {
        let idx = self
            .journal_titles
            .binary_search_by(|(id, _)| (*id).cmp(journal_id))
            .ok()?;
        self.journal_titles[idx]
            .1
            .iter()
            .map(|t| edit_distance(work, t))
            .min()
    }

    /// Compare a reference with one document, field by field.
    fn compare(
        &self,
        r: &RawReference,
        work: &str,
        doc: &DocumentRecord,
    ) -> (FieldEvidence, usize) {
        let distance = self
            .journal_distance(work, &doc.journal_id)
            .unwrap_or(usize::MAX);
        (self.compare_at(r, doc, distance), distance)
    }

    /// As `compare`, with the title distance to the document's journal already known.
    fn compare_at(&self, r: &RawReference, doc: &DocumentRecord, distance: usize) -> FieldEvidence {
        let title = if distance == 0 {
            Evidence::Exact
        } else if distance <= self.cfg.title_edit_distance_max {
            Evidence::Near
        } else {
            Evidence::Mismatch
        };
        let doi = match (
            non_empty(r.cited_doi.as_deref()),
            non_empty(doc.doi.as_deref()),
        ) {
            (Some(a), Some(b)) if doi_key(a) == doi_key(b) => Evidence::Exact,
            (Some(_), Some(_)) => Evidence::Mismatch,
            _ => Evidence::Absent,
        };
        let year = match r.cited_year {
            Some(y) if y == doc.year => Evidence::Exact,
            Some(y) if y.abs_diff(doc.year) == 1 => Evidence::Near,
            Some(_) => Evidence::Mismatch,
            None => Evidence::Absent,
        };
        let volume = match (r.cited_volume, doc.volume) {
            (Some(a), Some(b)) if a == b => Evidence::Exact,
            (Some(_), Some(_)) => Evidence::Mismatch,
            _ => Evidence::Absent,
        };
        let page = match (
            non_empty(r.cited_page.as_deref()),
            non_empty(doc.first_page.as_deref()),
        ) {
            (Some(a), Some(b)) if page_key(a) == page_key(b) => Evidence::Exact,
            (Some(_), Some(_)) => Evidence::Mismatch,
            _ => Evidence::Absent,
        };
        FieldEvidence {
            doi,
            title,
            year,
            volume,
            page,
            tied_candidates: 0,
        }
    }

    fn candidate(
        &self,
        r: &RawReference,
        doc: &'c DocumentRecord,
        distance: usize,
    ) -> Candidate<'c> {
        let evidence = self.compare_at(r, doc, distance);
        Candidate {
            doc,
            score: evidence.score(),
            evidence,
            distance,
        }
    }

    fn link(
        &self,
        citing_doc_id: &str,
        r: &RawReference,
        class: MatchClass,
        target_doc: Option<&str>,
        target_journal: Option<&str>,
        evidence: FieldEvidence,
    ) -> ResolvedLink {
        ResolvedLink {
            citing_doc_id: citing_doc_id.to_string(),
            ref_index: r.ref_index,
            target_doc_id: target_doc.map(String::from),
            target_journal_id: target_journal.map(String::from),
            match_class: class,
            score: evidence.score(),
            field_evidence: evidence,
        }
    }

    fn pick(&self, mut cands: Vec<Candidate<'c>>) -> Option<(Candidate<'c>, u32)> {
        cands.sort_by(|a, b| {
            b.score
                .cmp(&a.score)
                .then(a.distance.cmp(&b.distance))
                .then_with(|| a.doc.doc_id.cmp(&b.doc.doc_id))
        });
        cands.dedup_by(|a, b| a.doc.doc_id == b.doc.doc_id);
        let first = cands.first()?;
        let tied = cands
            .iter()
            .take_while(|c| c.score == first.score && c.distance == first.distance)
            .count() as u32;
        let winner = cands.into_iter().next()?;
        Some((winner, tied))
    }

    pub fn resolve(&self, citing_doc_id: &str, r: &RawReference) -> ResolvedLink {
        let work = self.cfg.normalize(&r.cited_work);

        // 1. DOI
        if self.cfg.doi_overrides_fields {
            if let Some(doi) = non_empty(r.cited_doi.as_deref()) {
                let docs = self.corpus.docs_by_doi(doi);
                if let Some(first) = docs.first() {
                    let doc = self.corpus.document(first).expect("indexed doc exists");
                    let (mut ev, _) = self.compare(r, &work, doc);
                    ev.tied_candidates = docs.len() as u32;
                    let class = if ev.all_present_agree() {
                        MatchClass::CompleteCorrect
                    } else {
                        MatchClass::Faulty
                    };
                    return self.link(citing_doc_id, r, class, Some(first), None, ev);
                }
            }
        }

        let hits = self.title_hits(&work);

        // 2. exact title, year, volume and page
        if let (Some(year), Some(vol), Some(page)) = (
            r.cited_year,
            r.cited_volume,
            non_empty(r.cited_page.as_deref()),
        ) {
            let cands: Vec<Candidate> = hits
                .iter()
                .filter(|h| h.distance == 0)
                .flat_map(|h| self.corpus.docs_by_key(h.journal_id, year, vol, page))
                .map(|id| self.candidate(r, self.corpus.document(id).expect("indexed"), 0))
                .filter(|c| c.evidence.doi != Evidence::Mismatch)
                .collect();
            if let Some((c, tied)) = self.pick(cands) {
                let mut ev = c.evidence;
                ev.tied_candidates = tied;
                return self.link(
                    citing_doc_id,
                    r,
                    MatchClass::CompleteCorrect,
                    Some(&c.doc.doc_id),
                    None,
                    ev,
                );
            }
        }

        // 3. fuzzy title with at least two exact locator fields
        let mut cands = Vec::new();
        for h in hits.iter() {
            let mut ids: Vec<&String> = Vec::new();
            if let Some(y) = r.cited_year {
                ids.extend(self.corpus.docs_in_journal_year(h.journal_id, y));
            }
            if let Some(v) = r.cited_volume {
                ids.extend(self.corpus.docs_in_journal_volume(h.journal_id, v));
            }
            for id in ids {
                let c = self.candidate(r, self.corpus.document(id).expect("indexed"), h.distance);
                if fuzzy_acceptable(&c.evidence) {
                    cands.push(c);
                }
            }
        }
        if let Some((c, tied)) = self.pick(cands) {
            let mut ev = c.evidence;
            ev.tied_candidates = tied;
            return self.link(
                citing_doc_id,
                r,
                MatchClass::IncompleteCorrect,
                Some(&c.doc.doc_id),
                None,
                ev,
            );
        }

        // 4. journal identified, but year/volume impossible for it
        for h in hits.iter() {
            let journal = self
                .corpus
                .journal(h.journal_id)
                .expect("hit journal exists");
            let year_bad = r
                .cited_year
                .is_some_and(|y| journal.coverage_status(y) != CoverageStatus::Covered);
            let volume_bad = matches!(
                (r.cited_volume, r.cited_year),
                (Some(v), Some(y)) if journal.volume_contradicts(v, y)
            );
            if year_bad || volume_bad {
                let ev = FieldEvidence {
                    doi: present_as_mismatch(r.cited_doi.as_deref()),
                    title: if h.distance == 0 {
                        Evidence::Exact
                    } else {
                        Evidence::Near
                    },
                    year: if year_bad {
                        Evidence::Mismatch
                    } else {
                        Evidence::Absent
                    },
                    volume: if volume_bad {
                        Evidence::Mismatch
                    } else {
                        Evidence::Absent
                    },
                    page: Evidence::Absent,
                    tied_candidates: 0,
                };
                return self.link(
                    citing_doc_id,
                    r,
                    MatchClass::Faulty,
                    None,
                    Some(h.journal_id),
                    ev,
                );
            }
        }

        // 5. ghost
        let ev = FieldEvidence {
            doi: present_as_mismatch(r.cited_doi.as_deref()),
            title: Evidence::Mismatch,
            year: if r.cited_year.is_some() {
                Evidence::Mismatch
            } else {
                Evidence::Absent
            },
            volume: if r.cited_volume.is_some() {
                Evidence::Mismatch
            } else {
                Evidence::Absent
            },
            page: present_as_mismatch(r.cited_page.as_deref()),
            tied_candidates: 0,
        };
        self.link(citing_doc_id, r, MatchClass::Ghost, None, None, ev)
    }
}

/// Year, volume and page: every present one exact, at least two of them exact.
fn fuzzy_acceptable(ev: &FieldEvidence) -> bool {
    let locators = [ev.year, ev.volume, ev.page];
    let exact = locators.iter().filter(|e| **e == Evidence::Exact).count();
    ev.title.agrees()
        && ev.doi != Evidence::Mismatch
        && exact >= 2
        && locators
            .iter()
            .all(|e| matches!(e, Evidence::Exact | Evidence::Absent))
}

fn non_empty(s: Option<&str>) -> Option<&str> {
    s.filter(|v| !v.trim().is_empty())
}

fn present_as_mismatch(s: Option<&str>) -> Evidence {
    if non_empty(s).is_some() {
        Evidence::Mismatch
    } else {
        Evidence::Absent
    }
}

/// Resolve a single reference made by `citing_doc_id`.
pub fn resolve_reference(
    citing_doc_id: &str,
    r: &RawReference,
    corpus: &Corpus,
    cfg: &ResolutionConfig,
) -> ResolvedLink {
    Resolver::new(corpus, cfg.clone()).resolve(citing_doc_id, r)
}

/// One link per (document, reference), sorted by `(citing_doc_id, ref_index)`.
pub fn resolve_corpus(corpus: &Corpus, cfg: &ResolutionConfig) -> Vec<ResolvedLink> {
    let resolver = Resolver::new(corpus, cfg.clone()).with_corpus_cache();
    let pairs: Vec<(&str, &RawReference)> = corpus
        .documents()
        .flat_map(|d| d.references.iter().map(move |r| (d.doc_id.as_str(), r)))
        .collect();
    let mut links: Vec<ResolvedLink> = pairs
        .into_par_iter()
        .map(|(id, r)| resolver.resolve(id, r))
        .collect();
    links.sort_by(|a, b| {
        a.citing_doc_id
            .cmp(&b.citing_doc_id)
            .then(a.ref_index.cmp(&b.ref_index))
    });
    links
}
