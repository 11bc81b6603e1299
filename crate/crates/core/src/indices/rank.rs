use std::cmp::Reverse;

use super::rounding::{display_decimals, format_decimal, round_half_away, RoundingPolicy};
use super::{IndexError, IndexResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedJournal {
    pub rank: usize,
    pub journal_id: String,
    pub display: String,
}

/// Competition ranking ("1224") on the displayed value, highest first.
///
/// Journals are compared on what the reader sees, so values that round to the
/// same display share a rank. Within a tie rows are listed by journal_id.
pub fn rank_journals(
    results: &[IndexResult],
    policy: RoundingPolicy,
) -> Result<Vec<RankedJournal>, IndexError> {
    if let Some(first) = results.first() {
        if results.iter().any(|r| r.spec != first.spec) {
            return Err(IndexError::MixedSpecs);
        }
    }
    let mut rows: Vec<_> = results
        .iter()
        .map(|r| {
            let decimals = display_decimals(policy, r.ci);
            (
                round_half_away(r.value, decimals),
                r.journal_id.as_str(),
                format_decimal(r.value, decimals),
            )
        })
        .collect();
    rows.sort_by(|a, b| (Reverse(a.0), a.1).cmp(&(Reverse(b.0), b.1)));

    let mut out: Vec<RankedJournal> = Vec::with_capacity(rows.len());
    for (i, (rounded, id, display)) in rows.iter().enumerate() {
        let rank = match i.checked_sub(1) {
            Some(prev) if rows[prev].0 == *rounded => out[prev].rank,
            _ => i + 1,
        };
        out.push(RankedJournal {
            rank,
            journal_id: id.to_string(),
            display: display.clone(),
        });
    }
    Ok(out)
}
