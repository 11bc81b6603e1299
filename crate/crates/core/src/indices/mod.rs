//! Garfield-index variants.
//!
//! An index is citations received in a census year `y` to a journal's items
//! from the `W` preceding years, divided by the number of those items. The
//! variants differ in how much checking the numerator gets:
//!
//! * `MM` counts every reference whose cited work matches a title of the
//!   journal and whose cited year falls in the window.
//! * `AM` is `MM` restricted to citing documents that are articles or reviews.
//! * `OneOne` counts verified one-to-one links from citable documents to
//!   citable documents of the journal.
//!
//! The denominator counts citable items (`CitableOnly`) or every item
//! (`AllItems`) published in the window while the journal was indexed.

mod bootstrap;
mod lineage;
mod rank;
mod rounding;
mod window;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use num_rational::Rational64;
use thiserror::Error;

use crate::corpus::{Corpus, CoverageStatus, DocumentRecord};
use crate::resolver::{ResolutionConfig, ResolvedLink};

pub use bootstrap::{bootstrap_ci, BootstrapConfig};
pub use lineage::{journal_scopes, lineage_groups, merge_journal_history, JournalScope};
pub use rank::{rank_journals, RankedJournal};
pub use rounding::{
    display_decimals, format_decimal, round_display, round_half_away, RoundingPolicy,
};
pub use window::{check_window_consistency, Repair, RepairAction, RepairReason};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("unknown journal {0}")]
    UnknownJournal(String),
    #[error("index undefined for {journal_id}: no documents in the cohort")]
    UndefinedIndex { journal_id: String, numerator: u64 },
    #[error("{journal_id}: suspension repair needs documents for {year} but the corpus has none")]
    MissingDocuments { journal_id: String, year: i32 },
    #[error("volume {volume} of {year} published by both {} and {}", .journals.0, .journals.1)]
    OverlapConflict {
        volume: u32,
        year: i32,
        journals: (String, String),
    },
    #[error("empty cohort")]
    EmptyCohort,
    #[error("results were computed under different variant specs")]
    MixedSpecs,
    #[error("invalid index spec: {0}")]
    InvalidSpec(String),
}

macro_rules! text_enum {
    ($ty:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($ty::$variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($ty::$variant),)+
                    other => Err(format!(
                        "unknown {} {other:?} (expected one of: {})",
                        stringify!($ty),
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NumeratorMode {
    MM,
    AM,
    OneOne,
}
text_enum!(NumeratorMode { MM => "mm", AM => "am", OneOne => "oneone" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DenominatorMode {
    CitableOnly,
    AllItems,
}
text_enum!(DenominatorMode { CitableOnly => "citable", AllItems => "all" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SelfCites {
    Include,
    Exclude,
}
text_enum!(SelfCites { Include => "include", Exclude => "exclude" });

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuspensionPolicy {
    OmitCitations,
    IncludeDocuments,
    /// No repair: citations to unindexed years stay in, as the published
    /// figures do.
    Ignore,
}
text_enum!(SuspensionPolicy {
    OmitCitations => "omit-cites",
    IncludeDocuments => "include-docs",
    Ignore => "ignore",
});

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexVariantSpec {
    pub numerator_mode: NumeratorMode,
    pub denominator_mode: DenominatorMode,
    pub self_cites: SelfCites,
    pub census_year: i32,
    pub window_years: u32,
    pub suspension_policy: SuspensionPolicy,
    pub merge_renames: bool,
}

impl IndexVariantSpec {
    /// Verified links, citable items, self-citations included, two-year window.
    pub fn new(census_year: i32) -> Self {
        IndexVariantSpec {
            numerator_mode: NumeratorMode::OneOne,
            denominator_mode: DenominatorMode::CitableOnly,
            self_cites: SelfCites::Include,
            census_year,
            window_years: 2,
            suspension_policy: SuspensionPolicy::OmitCitations,
            merge_renames: true,
        }
    }

    pub fn with_numerator(mut self, mode: NumeratorMode) -> Self {
        self.numerator_mode = mode;
        self
    }

    pub fn with_denominator(mut self, mode: DenominatorMode) -> Self {
        self.denominator_mode = mode;
        self
    }

    pub fn with_self_cites(mut self, policy: SelfCites) -> Self {
        self.self_cites = policy;
        self
    }

    pub fn with_window(mut self, years: u32) -> Self {
        self.window_years = years;
        self
    }

    pub fn with_suspension(mut self, policy: SuspensionPolicy) -> Self {
        self.suspension_policy = policy;
        self
    }

    pub fn with_merge_renames(mut self, merge: bool) -> Self {
        self.merge_renames = merge;
        self
    }

    /// Cohort years `[y - W, y - 1]`.
    pub fn window(&self) -> RangeInclusive<i32> {
        (self.census_year - self.window_years as i32)..=(self.census_year - 1)
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        if self.window_years == 0 {
            return Err(IndexError::InvalidSpec(
                "window_years must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A reference as seen by the string-matching numerators.
#[derive(Debug, Clone, Copy)]
struct CitedWork<'a> {
    citing: &'a DocumentRecord,
    ref_index: u32,
    cited_year: Option<i32>,
}

/// A reference counted by the string-matching numerators.
#[derive(Debug, Clone, Copy)]
pub struct TitleMatchedCitation<'a> {
    pub citing: &'a DocumentRecord,
    pub ref_index: u32,
    pub cited_year: i32,
}

impl TitleMatchedCitation<'_> {
    pub fn key(&self) -> String {
        format!("{}#{}", self.citing.doc_id, self.ref_index)
    }
}

/// Corpus, resolved links and the lookups every index computation shares.
pub struct IndexInputs<'a> {
    pub corpus: &'a Corpus,
    pub links: &'a [ResolvedLink],
    pub resolution: &'a ResolutionConfig,
    links_by_target: HashMap<&'a str, Vec<usize>>,
    refs_by_work: HashMap<String, Vec<CitedWork<'a>>>,
    journal_titles: HashMap<&'a str, BTreeSet<String>>,
}

impl<'a> IndexInputs<'a> {
    pub fn new(
        corpus: &'a Corpus,
        links: &'a [ResolvedLink],
        resolution: &'a ResolutionConfig,
    ) -> Self {
        let mut links_by_target: HashMap<&str, Vec<usize>> = HashMap::new();
        for (i, l) in links.iter().enumerate() {
            if let Some(t) = l.target_doc_id.as_deref() {
                links_by_target.entry(t).or_default().push(i);
            }
        }
        let mut refs_by_work: HashMap<String, Vec<CitedWork>> = HashMap::new();
        for d in corpus.documents() {
            for r in &d.references {
                refs_by_work
                    .entry(resolution.normalize(&r.cited_work))
                    .or_default()
                    .push(CitedWork {
                        citing: d,
                        ref_index: r.ref_index,
                        cited_year: r.cited_year,
                    });
            }
        }
        let journal_titles = corpus
            .journals()
            .map(|j| {
                (
                    j.journal_id.as_str(),
                    j.titles().map(|t| resolution.normalize(t)).collect(),
                )
            })
            .collect();
        IndexInputs {
            corpus,
            links,
            resolution,
            links_by_target,
            refs_by_work,
            journal_titles,
        }
    }

    pub fn links_to(&self, doc_id: &str) -> impl Iterator<Item = &'a ResolvedLink> + '_ {
        self.links_by_target
            .get(doc_id)
            .into_iter()
            .flatten()
            .map(|&i| &self.links[i])
    }

    fn scope_titles(&self, scope: &JournalScope) -> BTreeSet<String> {
        scope
            .record
            .titles()
            .map(|t| self.resolution.normalize(t))
            .collect()
    }

    /// Citing journal shares a title with the scope.
    fn title_self_cite(&self, citing_journal: &str, titles: &BTreeSet<String>) -> bool {
        self.journal_titles
            .get(citing_journal)
            .is_some_and(|own| !own.is_disjoint(titles))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CohortYear {
    pub year: i32,
    pub cites: u64,
    pub docs: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexResult {
    pub journal_id: String,
    pub spec: IndexVariantSpec,
    pub numerator: u64,
    pub denominator: u64,
    pub value: Rational64,
    pub ci: Option<(Rational64, Rational64)>,
    pub display: String,
    pub per_year_breakdown: Vec<CohortYear>,
    pub repairs: Vec<Repair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IndexOptions {
    pub rounding: RoundingPolicy,
    pub bootstrap: Option<BootstrapConfig>,
}

struct Breakdown<'a> {
    years: Vec<CohortYear>,
    repairs: Vec<Repair>,
    /// Documents counted in the denominator, in doc_id order per year.
    cohort_docs: Vec<&'a DocumentRecord>,
}

fn doc_counts(spec: &IndexVariantSpec, doc: &DocumentRecord) -> bool {
    match spec.denominator_mode {
        DenominatorMode::CitableOnly => doc.is_citable(),
        DenominatorMode::AllItems => true,
    }
}

/// Denominator documents per cohort year, after gap handling.
fn cohort_documents<'a>(
    scope: &JournalScope,
    corpus: &'a Corpus,
    spec: &IndexVariantSpec,
    repairs: &[Repair],
) -> BTreeMap<i32, Vec<&'a DocumentRecord>> {
    let mut out: BTreeMap<i32, Vec<&DocumentRecord>> = BTreeMap::new();
    for year in spec.window() {
        let included = match scope.record.coverage_status(year) {
            CoverageStatus::Covered => true,
            CoverageStatus::Gap => repairs
                .iter()
                .any(|r| r.year == year && r.action == RepairAction::IncludeDocuments),
            CoverageStatus::PreCommencement => false,
        };
        let mut docs: Vec<&DocumentRecord> = Vec::new();
        if included {
            for m in &scope.members {
                docs.extend(
                    corpus
                        .docs_in_journal_year(m, year)
                        .iter()
                        .filter_map(|id| corpus.document(id))
                        .filter(|d| doc_counts(spec, d)),
                );
            }
            docs.sort_by(|a, b| a.doc_id.cmp(&b.doc_id));
        }
        out.insert(year, docs);
    }
    out
}

/// Raw numerator citations per cohort year, before repairs.
fn raw_citations(
    scope: &JournalScope,
    inputs: &IndexInputs,
    spec: &IndexVariantSpec,
) -> BTreeMap<i32, u64> {
    let window = spec.window();
    let mut cites: BTreeMap<i32, u64> = window.clone().map(|y| (y, 0)).collect();
    match spec.numerator_mode {
        NumeratorMode::MM | NumeratorMode::AM => {
            for c in title_matched_citations(scope, inputs, spec) {
                *cites.entry(c.cited_year).or_default() += 1;
            }
        }
        NumeratorMode::OneOne => {
            for year in window {
                let mut n = 0;
                for m in &scope.members {
                    for id in inputs.corpus.docs_in_journal_year(m, year) {
                        let target = inputs.corpus.document(id).expect("indexed doc");
                        if !target.is_citable() {
                            continue;
                        }
                        n += inputs
                            .links_to(id)
                            .filter(|l| verified_citation(scope, inputs, spec, l, true))
                            .count() as u64;
                    }
                }
                cites.insert(year, n);
            }
        }
    }
    cites
}

/// References in census-year documents whose cited work equals one of the
/// scope's titles and whose cited year is in the window, filtered by the
/// spec's citing-side and self-citation rules. No repairs are applied.
/// Ordered by normalized title, then citing doc_id.
pub fn title_matched_citations<'a>(
    scope: &JournalScope,
    inputs: &IndexInputs<'a>,
    spec: &IndexVariantSpec,
) -> Vec<TitleMatchedCitation<'a>> {
    let window = spec.window();
    let titles = inputs.scope_titles(scope);
    let mut out = Vec::new();
    for title in &titles {
        for w in inputs.refs_by_work.get(title).into_iter().flatten() {
            let Some(cited_year) = w.cited_year.filter(|y| window.contains(y)) else {
                continue;
            };
            if w.citing.year != spec.census_year {
                continue;
            }
            if spec.numerator_mode == NumeratorMode::AM && !w.citing.is_citable() {
                continue;
            }
            if spec.self_cites == SelfCites::Exclude
                && inputs.title_self_cite(&w.citing.journal_id, &titles)
            {
                continue;
            }
            out.push(TitleMatchedCitation {
                citing: w.citing,
                ref_index: w.ref_index,
                cited_year,
            });
        }
    }
    out
}

/// Whether `link` counts as a citation in census year `y` under `spec`'s
/// citing-side rules. `verified_only` additionally requires a cited-side match.
fn verified_citation(
    scope: &JournalScope,
    inputs: &IndexInputs,
    spec: &IndexVariantSpec,
    link: &ResolvedLink,
    verified_only: bool,
) -> bool {
    if verified_only && !link.is_verified(inputs.resolution.count_incomplete_in_g11) {
        return false;
    }
    let Some(citing) = inputs.corpus.document(&link.citing_doc_id) else {
        return false;
    };
    if citing.year != spec.census_year {
        return false;
    }
    if spec.numerator_mode != NumeratorMode::MM && !citing.is_citable() {
        return false;
    }
    !(spec.self_cites == SelfCites::Exclude && scope.contains(&citing.journal_id))
}

fn breakdown<'a>(
    scope: &JournalScope,
    inputs: &IndexInputs<'a>,
    spec: &IndexVariantSpec,
) -> Result<Breakdown<'a>, IndexError> {
    spec.validate()?;
    let mut repairs = check_window_consistency(scope, spec, inputs.corpus)?;
    let docs = cohort_documents(scope, inputs.corpus, spec, &repairs);
    let mut cites = raw_citations(scope, inputs, spec);

    for r in &repairs {
        if r.action == RepairAction::DropCitations {
            cites.insert(r.year, 0);
        }
    }
    if spec.suspension_policy != SuspensionPolicy::Ignore {
        for (year, n) in cites.iter_mut() {
            if *n > 0 && docs.get(year).is_none_or(Vec::is_empty) {
                *n = 0;
                repairs.push(Repair {
                    year: *year,
                    action: RepairAction::DropCitations,
                    reason: RepairReason::NoDocuments,
                });
            }
        }
    }
    repairs.sort();

    let years = spec
        .window()
        .map(|year| CohortYear {
            year,
            cites: cites.get(&year).copied().unwrap_or(0),
            docs: docs.get(&year).map_or(0, |d| d.len() as u64),
        })
        .collect();
    let cohort_docs = docs.into_values().flatten().collect();
    Ok(Breakdown {
        years,
        repairs,
        cohort_docs,
    })
}

pub fn compute_numerator(
    scope: &JournalScope,
    inputs: &IndexInputs,
    spec: &IndexVariantSpec,
) -> Result<u64, IndexError> {
    Ok(breakdown(scope, inputs, spec)?
        .years
        .iter()
        .map(|y| y.cites)
        .sum())
}

pub fn compute_denominator(
    scope: &JournalScope,
    corpus: &Corpus,
    spec: &IndexVariantSpec,
) -> Result<u64, IndexError> {
    spec.validate()?;
    let repairs = check_window_consistency(scope, spec, corpus)?;
    Ok(cohort_documents(scope, corpus, spec, &repairs)
        .values()
        .map(|d| d.len() as u64)
        .sum())
}

/// Verified citations per denominator document, the resampling unit for the CI.
fn per_document_counts(
    scope: &JournalScope,
    inputs: &IndexInputs,
    spec: &IndexVariantSpec,
    b: &Breakdown,
) -> Vec<u64> {
    let dropped: BTreeSet<i32> = b
        .repairs
        .iter()
        .filter(|r| r.action == RepairAction::DropCitations)
        .map(|r| r.year)
        .collect();
    b.cohort_docs
        .iter()
        .map(|d| {
            if dropped.contains(&d.year) {
                return 0;
            }
            inputs
                .links_to(&d.doc_id)
                .filter(|l| verified_citation(scope, inputs, spec, l, true))
                .count() as u64
        })
        .collect()
}

pub fn compute_index(
    scope: &JournalScope,
    inputs: &IndexInputs,
    spec: &IndexVariantSpec,
    options: &IndexOptions,
) -> Result<IndexResult, IndexError> {
    let b = breakdown(scope, inputs, spec)?;
    let numerator: u64 = b.years.iter().map(|y| y.cites).sum();
    let denominator: u64 = b.years.iter().map(|y| y.docs).sum();
    if denominator == 0 {
        return Err(IndexError::UndefinedIndex {
            journal_id: scope.id().to_string(),
            numerator,
        });
    }
    let value = Rational64::new(numerator as i64, denominator as i64);

    let ci = match options.bootstrap {
        None => None,
        Some(cfg) => {
            let counts = per_document_counts(scope, inputs, spec, &b);
            let (lo, hi) = bootstrap_ci(&counts, cfg.level, cfg.replicates, cfg.seed)?;
            let attributed: u64 = counts.iter().sum();
            let (lo, hi) = if attributed == 0 {
                (value, value)
            } else {
                let mean = Rational64::new(attributed as i64, counts.len() as i64);
                let scale = value / mean;
                (lo * scale, hi * scale)
            };
            Some((lo.min(value), hi.max(value)))
        }
    };

    Ok(IndexResult {
        journal_id: scope.id().to_string(),
        spec: *spec,
        numerator,
        denominator,
        value,
        ci,
        display: round_display(value, options.rounding, ci),
        per_year_breakdown: b.years,
        repairs: b.repairs,
    })
}

/// Index value straight from counts, for published figures.
pub fn index_from_counts(
    numerator: u64,
    denominator: u64,
    policy: RoundingPolicy,
) -> Option<(Rational64, String)> {
    if denominator == 0 {
        return None;
    }
    let value = Rational64::new(numerator as i64, denominator as i64);
    Some((value, round_display(value, policy, None)))
}

/// `n/a` for undefined indices; zero is a real value and is never used as a placeholder.
pub const UNDEFINED_DISPLAY: &str = "n/a";
