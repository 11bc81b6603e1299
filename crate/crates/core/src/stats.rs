//! Distribution statistics over per-document citation counts, and citation
//! accrual by years since publication.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::indices::{IndexError, IndexInputs, JournalScope};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty cohort")]
    EmptyCohort,
    #[error("curve has no citations at positive offsets")]
    DegenerateCurve,
    #[error("coverage target must lie in (0, 1]")]
    InvalidTarget,
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionSummary {
    pub n_docs: u64,
    pub mean: Rational64,
    pub median: Rational64,
    /// Most frequent count; the smallest one when several tie.
    pub mode: u64,
    pub min: u64,
    pub max: u64,
    pub share_uncited: Rational64,
}

pub fn distribution_summary(counts: &[u64]) -> Result<DistributionSummary, StatsError> {
    if counts.is_empty() {
        return Err(StatsError::EmptyCohort);
    }
    let n = counts.len();
    let mut sorted = counts.to_vec();
    sorted.sort_unstable();
    let total: u64 = sorted.iter().sum();
    let median = if n % 2 == 1 {
        Rational64::from_integer(sorted[n / 2] as i64)
    } else {
        Rational64::new((sorted[n / 2 - 1] + sorted[n / 2]) as i64, 2)
    };
    let mut mode = (sorted[0], 0usize);
    for run in sorted.chunk_by(|a, b| a == b) {
        // strict > keeps the smaller value on ties
        if run.len() > mode.1 {
            mode = (run[0], run.len());
        }
    }
    let uncited = sorted.iter().take_while(|c| **c == 0).count();
    Ok(DistributionSummary {
        n_docs: n as u64,
        mean: Rational64::new(total as i64, n as i64),
        median,
        mode: mode.0,
        min: sorted[0],
        max: sorted[n - 1],
        share_uncited: Rational64::new(uncited as i64, n as i64),
    })
}

/// Verified citations made in `census_year`, by any document, to each citable
/// item the scope published in `window`, in doc_id order within each year.
pub fn cohort_citation_counts(
    scope: &JournalScope,
    inputs: &IndexInputs,
    census_year: i32,
    window: std::ops::RangeInclusive<i32>,
) -> Vec<u64> {
    let count_incomplete = inputs.resolution.count_incomplete_in_g11;
    let mut out = Vec::new();
    for year in window {
        let mut docs: Vec<&str> = scope
            .members
            .iter()
            .flat_map(|m| inputs.corpus.docs_in_journal_year(m, year))
            .map(String::as_str)
            .collect();
        docs.sort_unstable();
        for id in docs {
            let doc = inputs.corpus.document(id).expect("indexed doc");
            if !doc.is_citable() {
                continue;
            }
            let n = inputs
                .links_to(id)
                .filter(|l| l.is_verified(count_incomplete))
                .filter(|l| {
                    inputs
                        .corpus
                        .document(&l.citing_doc_id)
                        .is_some_and(|c| c.year == census_year)
                })
                .count();
            out.push(n as u64);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccrualCurve {
    pub journal_id: String,
    pub cohort_year: i32,
    /// `(years since publication, citations)`, ascending, zero rows omitted.
    pub counts_by_offset: Vec<(u32, u64)>,
    pub peak_offset: u32,
    /// Links whose citing document predates the cited cohort.
    pub predating: Vec<String>,
}

impl AccrualCurve {
    pub fn total(&self) -> u64 {
        self.counts_by_offset.iter().map(|(_, c)| c).sum()
    }

    pub fn count_at(&self, offset: u32) -> u64 {
        self.counts_by_offset
            .iter()
            .find(|(o, _)| *o == offset)
            .map_or(0, |(_, c)| *c)
    }

    /// Build a curve from offset counts; peak is the smallest offset with the
    /// largest count.
    pub fn from_counts(
        journal_id: &str,
        cohort_year: i32,
        counts: impl IntoIterator<Item = (u32, u64)>,
    ) -> Self {
        let mut map: BTreeMap<u32, u64> = BTreeMap::new();
        for (o, c) in counts {
            *map.entry(o).or_default() += c;
        }
        map.retain(|_, c| *c > 0);
        let peak_offset = map
            .iter()
            .fold(None, |best: Option<(u32, u64)>, (&o, &c)| match best {
                Some((_, bc)) if bc >= c => best,
                _ => Some((o, c)),
            })
            .map_or(0, |(o, _)| o);
        AccrualCurve {
            journal_id: journal_id.to_string(),
            cohort_year,
            counts_by_offset: map.into_iter().collect(),
            peak_offset,
            predating: Vec::new(),
        }
    }
}

/// Verified citations to the scope's citable items of `cohort_year`, bucketed
/// by citing year minus cohort year. Only the cited side is restricted: an
/// editorial citing a cohort article counts.
pub fn accrual_curve(
    journal_id: &str,
    cohort_year: i32,
    inputs: &IndexInputs,
    merge_renames: bool,
) -> Result<AccrualCurve, StatsError> {
    let scope = JournalScope::resolve(inputs.corpus, journal_id, merge_renames)?;
    accrual_curve_for_scope(&scope, cohort_year, inputs)
}

pub fn accrual_curve_for_scope(
    scope: &JournalScope,
    cohort_year: i32,
    inputs: &IndexInputs,
) -> Result<AccrualCurve, StatsError> {
    let count_incomplete = inputs.resolution.count_incomplete_in_g11;
    let mut cohort: Vec<&str> = scope
        .members
        .iter()
        .flat_map(|m| inputs.corpus.docs_in_journal_year(m, cohort_year))
        .map(String::as_str)
        .filter(|id| inputs.corpus.document(id).is_some_and(|d| d.is_citable()))
        .collect();
    if cohort.is_empty() {
        return Err(StatsError::EmptyCohort);
    }
    cohort.sort_unstable();

    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    let mut predating = Vec::new();
    for id in cohort {
        for l in inputs
            .links_to(id)
            .filter(|l| l.is_verified(count_incomplete))
        {
            let Some(citing) = inputs.corpus.document(&l.citing_doc_id) else {
                continue;
            };
            let offset = citing.year - cohort_year;
            if offset < 0 {
                predating.push(l.key());
            } else {
                *counts.entry(offset as u32).or_default() += 1;
            }
        }
    }
    predating.sort();
    let mut curve = AccrualCurve::from_counts(scope.id(), cohort_year, counts);
    curve.predating = predating;
    Ok(curve)
}

/// Smallest window `W >= 1` whose offsets `1..=W` hold at least
/// `coverage_target` of the citations at positive offsets.
pub fn suggest_window(
    curve: &AccrualCurve,
    coverage_target: Rational64,
) -> Result<u32, StatsError> {
    if coverage_target <= Rational64::zero() || coverage_target > Rational64::one() {
        return Err(StatsError::InvalidTarget);
    }
    let positive: Vec<(u32, u64)> = curve
        .counts_by_offset
        .iter()
        .copied()
        .filter(|(o, _)| *o >= 1)
        .collect();
    let total: u64 = positive.iter().map(|(_, c)| c).sum();
    if total == 0 {
        return Err(StatsError::DegenerateCurve);
    }
    let needed = coverage_target * Rational64::from_integer(total as i64);
    let mut cum = 0u64;
    for (offset, c) in positive {
        cum += c;
        if Rational64::from_integer(cum as i64) >= needed {
            return Ok(offset.max(1));
        }
    }
    unreachable!("cumulative sum reaches the total")
}
