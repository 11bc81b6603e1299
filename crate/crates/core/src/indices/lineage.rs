//! Journal lineages: one title renamed over time, or re-commenced after a
//! suspension, counted as a single journal.

use std::collections::{BTreeMap, BTreeSet};

use crate::corpus::{Corpus, JournalRecord, YearRange};

use super::IndexError;

/// The set of journal records an index is computed over, plus a virtual
/// record carrying their combined history.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalScope {
    pub record: JournalRecord,
    /// Member journal ids, sorted.
    pub members: Vec<String>,
}

impl JournalScope {
    pub fn id(&self) -> &str {
        &self.record.journal_id
    }

    pub fn contains(&self, journal_id: &str) -> bool {
        self.members
            .binary_search_by(|m| m.as_str().cmp(journal_id))
            .is_ok()
    }

    pub fn single(corpus: &Corpus, journal_id: &str) -> Result<Self, IndexError> {
        let record = corpus
            .journal(journal_id)
            .ok_or_else(|| IndexError::UnknownJournal(journal_id.to_string()))?;
        Ok(JournalScope {
            record: record.clone(),
            members: vec![journal_id.to_string()],
        })
    }

    /// The scope for `journal_id`: its whole ISSN lineage when `merge_renames`
    /// is set, otherwise the journal alone.
    pub fn resolve(
        corpus: &Corpus,
        journal_id: &str,
        merge_renames: bool,
    ) -> Result<Self, IndexError> {
        if corpus.journal(journal_id).is_none() {
            return Err(IndexError::UnknownJournal(journal_id.to_string()));
        }
        if !merge_renames {
            return Self::single(corpus, journal_id);
        }
        let group = lineage_groups(corpus)
            .into_iter()
            .find(|g| g.iter().any(|m| m == journal_id))
            .expect("every journal belongs to a group");
        let ids: Vec<&str> = group.iter().map(String::as_str).collect();
        merge_journal_history(&ids, corpus)
    }
}

fn issn_key(issn: &str) -> String {
    issn.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_uppercase())
        .collect()
}

/// Journals connected through shared ISSNs, each group sorted, groups ordered
/// by their first member.
pub fn lineage_groups(corpus: &Corpus) -> Vec<Vec<String>> {
    let ids: Vec<&str> = corpus.journals().map(|j| j.journal_id.as_str()).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    for (i, j) in corpus.journals().enumerate() {
        for issn in &j.issns {
            let key = issn_key(issn);
            if key.is_empty() {
                continue;
            }
            match owner.get(&key) {
                Some(&k) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, k));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    owner.insert(key, i);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(id.to_string());
    }
    groups.into_values().collect()
}

/// One scope per lineage (or per journal when `merge_renames` is off), in id order.
pub fn journal_scopes(
    corpus: &Corpus,
    merge_renames: bool,
) -> Result<Vec<JournalScope>, IndexError> {
    if !merge_renames {
        return corpus
            .journals()
            .map(|j| JournalScope::single(corpus, &j.journal_id))
            .collect();
    }
    lineage_groups(corpus)
        .iter()
        .map(|g| {
            let ids: Vec<&str> = g.iter().map(String::as_str).collect();
            merge_journal_history(&ids, corpus)
        })
        .collect()
}

/// Combine journals into one virtual journal.
///
/// The virtual id joins the member ids with `+`; a single member keeps its own
/// record unchanged.
pub fn merge_journal_history(
    journal_ids: &[&str],
    corpus: &Corpus,
) -> Result<JournalScope, IndexError> {
    let mut ids: Vec<&str> = journal_ids.to_vec();
    ids.sort_unstable();
    ids.dedup();
    let records = ids
        .iter()
        .map(|id| {
            corpus
                .journal(id)
                .ok_or_else(|| IndexError::UnknownJournal(id.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    match records.as_slice() {
        [] => return Err(IndexError::InvalidSpec("empty journal lineage".into())),
        [only] => {
            return Ok(JournalScope {
                record: (*only).clone(),
                members: vec![only.journal_id.clone()],
            })
        }
        _ => {}
    }

    // (volume, year) published by each member
    let mut published: BTreeMap<(u32, i32), &str> = BTreeMap::new();
    for j in &records {
        let mut own: BTreeSet<(u32, i32)> = corpus
            .docs_in_journal(&j.journal_id)
            .iter()
            .filter_map(|id| corpus.document(id))
            .filter_map(|d| d.volume.map(|v| (v, d.year)))
            .collect();
        if let Some(map) = &j.volume_year_map {
            own.extend(map.iter().map(|vy| (vy.volume, vy.year)));
        }
        for key in own {
            if let Some(other) = published.insert(key, &j.journal_id) {
                return Err(IndexError::OverlapConflict {
                    volume: key.0,
                    year: key.1,
                    journals: (other.to_string(), j.journal_id.clone()),
                });
            }
        }
    }

    let mut issns: Vec<String> = records
        .iter()
        .flat_map(|j| j.issns.iter().cloned())
        .collect();
    issns.sort();
    issns.dedup();
    let mut title_history: Vec<_> = records
        .iter()
        .flat_map(|j| j.title_history.iter().cloned())
        .collect();
    title_history.sort_by(|a, b| (a.from_year, &a.title).cmp(&(b.from_year, &b.title)));

    let coverage = if records.iter().all(|j| j.coverage.is_empty()) {
        Vec::new()
    } else {
        let mut ranges: Vec<YearRange> = records
            .iter()
            .flat_map(|j| {
                if j.coverage.is_empty() {
                    vec![YearRange {
                        from_year: j.commencement_year,
                        to_year: None,
                    }]
                } else {
                    j.coverage.clone()
                }
            })
            .collect();
        ranges.sort_by_key(|r| r.from_year);
        coalesce(ranges)
    };

    let volume_year_map = if records.iter().all(|j| j.volume_year_map.is_none()) {
        None
    } else {
        let mut map: Vec<_> = records
            .iter()
            .flat_map(|j| j.volume_year_map.iter().flatten().copied())
            .collect();
        map.sort_by_key(|vy| (vy.volume, vy.year));
        map.dedup();
        Some(map)
    };

    Ok(JournalScope {
        record: JournalRecord {
            journal_id: ids.join("+"),
            issns,
            title_history,
            commencement_year: records
                .iter()
                .map(|j| j.commencement_year)
                .min()
                .unwrap_or(0),
            coverage,
            volume_year_map,
        },
        members: ids.iter().map(|s| s.to_string()).collect(),
    })
}

/// Merge sorted ranges that overlap or touch.
fn coalesce(ranges: Vec<YearRange>) -> Vec<YearRange> {
    let mut out: Vec<YearRange> = Vec::with_capacity(ranges.len());
    for r in ranges {
        if let Some(last) = out.last_mut() {
            match last.to_year {
                None => continue,
                Some(to) if r.from_year <= to + 1 => {
                    last.to_year = r.to_year.map(|rt| rt.max(to));
                    continue;
                }
                _ => {}
            }
        }
        out.push(r);
    }
    out
}
