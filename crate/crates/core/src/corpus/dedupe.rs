//! Duplicate-record merging.
//!
//! Two documents are the same work when they share a DOI, or when journal,
//! year, volume and first-author surname agree and their first pages are equal
//! or adjacent (off-by-one pagination is a common database entry error).

use std::collections::{BTreeMap, HashMap};

use super::{doi_key, page_key, Corpus, DocType, DocumentRecord, RawReference};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergedGroup {
    pub survivor: String,
    pub absorbed: Vec<String>,
}

/// A duplicate group left unmerged because its records disagree on document type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeConflict {
    pub doc_ids: Vec<String>,
    pub doc_types: Vec<DocType>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MergeReport {
    pub merged: Vec<MergedGroup>,
    pub conflicts: Vec<MergeConflict>,
}

impl MergeReport {
    pub fn is_empty(&self) -> bool {
        self.merged.is_empty() && self.conflicts.is_empty()
    }
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // lower index wins so roots are stable
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

fn pages_close(a: &str, b: &str) -> bool {
    let (ka, kb) = (page_key(a), page_key(b));
    if ka == kb {
        return true;
    }
    match (ka.parse::<u64>(), kb.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.abs_diff(y) <= 1,
        _ => false,
    }
}

pub fn dedupe_documents(corpus: Corpus) -> (Corpus, MergeReport) {
    let (journals, documents) = corpus.into_parts();
    let docs: Vec<DocumentRecord> = documents.into_values().collect();
    let mut sets = DisjointSet::new(docs.len());

    let mut by_doi: HashMap<String, usize> = HashMap::new();
    type Block<'a> = (&'a str, i32, u32, String);
    let mut blocks: BTreeMap<Block, Vec<usize>> = BTreeMap::new();
    for (i, d) in docs.iter().enumerate() {
        if let Some(doi) = d.doi.as_deref().filter(|s| !s.trim().is_empty()) {
            match by_doi.get(&doi_key(doi)) {
                Some(&j) => sets.union(i, j),
                None => {
                    by_doi.insert(doi_key(doi), i);
                }
            }
        }
        if let (Some(vol), Some(_), Some(surname)) =
            (d.volume, d.first_page.as_deref(), d.first_author_surname())
        {
            blocks
                .entry((&d.journal_id, d.year, vol, surname.trim().to_uppercase()))
                .or_default()
                .push(i);
        }
    }
    for members in blocks.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                let (pi, pj) = (docs[i].first_page.as_deref(), docs[j].first_page.as_deref());
                if pages_close(pi.unwrap_or(""), pj.unwrap_or("")) {
                    sets.union(i, j);
                }
            }
        }
    }

    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..docs.len() {
        let root = sets.find(i);
        groups.entry(root).or_default().push(i);
    }

    let mut report = MergeReport::default();
    let mut slots: Vec<Option<DocumentRecord>> = docs.into_iter().map(Some).collect();
    let mut out = BTreeMap::new();
    for members in groups.into_values() {
        if members.len() == 1 {
            let d = slots[members[0]].take().expect("each slot taken once");
            out.insert(d.doc_id.clone(), d);
            continue;
        }
        let group: Vec<DocumentRecord> = members
            .iter()
            .map(|&i| slots[i].take().expect("each slot taken once"))
            .collect();
        let first_type = group[0].doc_type;
        if group.iter().any(|d| d.doc_type != first_type) {
            report.conflicts.push(MergeConflict {
                doc_ids: group.iter().map(|d| d.doc_id.clone()).collect(),
                doc_types: group.iter().map(|d| d.doc_type).collect(),
            });
            for d in group {
                out.insert(d.doc_id.clone(), d);
            }
            continue;
        }
        let (survivor, absorbed) = merge_group(group);
        report.merged.push(MergedGroup {
            survivor: survivor.doc_id.clone(),
            absorbed,
        });
        out.insert(survivor.doc_id.clone(), survivor);
    }
    report.merged.sort_by(|a, b| a.survivor.cmp(&b.survivor));
    report.conflicts.sort_by(|a, b| a.doc_ids.cmp(&b.doc_ids));
    (Corpus::from_maps(journals, out), report)
}

/// `group` is in doc_id order.
fn merge_group(group: Vec<DocumentRecord>) -> (DocumentRecord, Vec<String>) {
    let best = group
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| {
            a.filled_fields()
                .cmp(&b.filled_fields())
                .then_with(|| b.doc_id.cmp(&a.doc_id))
                .then_with(|| ib.cmp(ia))
        })
        .map(|(i, _)| i)
        .expect("group non-empty");

    let mut rest = group;
    let mut survivor = rest.remove(best);
    let mut refs: Vec<RawReference> = std::mem::take(&mut survivor.references);
    let mut absorbed = Vec::with_capacity(rest.len());
    for d in rest {
        for r in d.references {
            if !refs.iter().any(|k| k.same_content(&r)) {
                refs.push(r);
            }
        }
        absorbed.push(d.doc_id);
    }
    for (i, r) in refs.iter_mut().enumerate() {
        r.ref_index = i as u32;
    }
    survivor.references = refs;
    (survivor, absorbed)
}
