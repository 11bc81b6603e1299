//! Slow, independent re-implementations used to cross-check the library.
//! Nothing here calls into the resolver or the index code.

use std::collections::{BTreeMap, BTreeSet};

use garfield_core::corpus::{Corpus, DocumentRecord, JournalRecord, RawReference};
use garfield_core::indices::{
    DenominatorMode, IndexVariantSpec, NumeratorMode, SelfCites, SuspensionPolicy,
};
use garfield_core::resolver::{MatchClass, ResolutionConfig, ResolvedLink};
use num_rational::Rational64;

/// Textbook Wagner-Fischer table over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = table[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = sub.min(table[i - 1][j] + 1).min(table[i][j - 1] + 1);
        }
    }
    table[a.len()][b.len()]
}

pub fn normalize(title: &str, truncation: usize) -> String {
    let words: Vec<String> = title
        .split_whitespace()
        .map(|w| {
            w.chars()
                .filter(|c| c.is_alphanumeric())
                .flat_map(char::to_uppercase)
                .collect::<String>()
        })
        .filter(|w| !w.is_empty())
        .collect();
    let joined = words.join(" ");
    let cut: String = joined.chars().take(truncation).collect();
    cut.trim_end().to_string()
}

fn page(p: &str) -> String {
    let first = p
        .trim()
        .split(['-', '\u{2013}'])
        .next()
        .unwrap_or("")
        .trim();
    let trimmed = first.trim_start_matches('0');
    if trimmed.is_empty() && !first.is_empty() {
        "0".into()
    } else {
        trimmed.to_uppercase()
    }
}

fn doi(d: &str) -> String {
    let d = d.trim().to_lowercase();
    for prefix in [
        "https://doi.org/",
        "http://doi.org/",
        "https://dx.doi.org/",
        "http://dx.doi.org/",
        "doi:",
        "doi ",
    ] {
        if let Some(rest) = d.strip_prefix(prefix) {
            return rest.trim().to_string();
        }
    }
    d
}

fn present(s: &Option<String>) -> Option<&str> {
    s.as_deref().filter(|v| !v.trim().is_empty())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum F {
    Exact,
    Near,
    Miss,
    Absent,
}

struct Pair {
    doi: F,
    title: F,
    year: F,
    volume: F,
    page: F,
    distance: usize,
}

impl Pair {
    fn score(&self) -> Rational64 {
        let fields = [
            (self.doi, 40),
            (self.title, 25),
            (self.year, 15),
            (self.volume, 10),
            (self.page, 10),
        ];
        let present: i64 = fields
            .iter()
            .filter(|(f, _)| *f != F::Absent)
            .map(|(_, w)| w)
            .sum();
        let hit: i64 = fields
            .iter()
            .filter(|(f, _)| matches!(f, F::Exact | F::Near))
            .map(|(_, w)| w)
            .sum();
        if present == 0 {
            Rational64::from_integer(0)
        } else {
            Rational64::new(hit, present)
        }
    }
}

fn journal_distance(work: &str, j: &JournalRecord, cfg: &ResolutionConfig) -> usize {
    j.title_history
        .iter()
        .map(|t| levenshtein(work, &normalize(&t.title, cfg.truncation_length)))
        .min()
        .unwrap_or(usize::MAX)
}

fn pair(
    r: &RawReference,
    work: &str,
    d: &DocumentRecord,
    corpus: &Corpus,
    cfg: &ResolutionConfig,
) -> Pair {
    let distance = journal_distance(work, corpus.journal(&d.journal_id).unwrap(), cfg);
    let title = if distance == 0 {
        F::Exact
    } else if distance <= cfg.title_edit_distance_max {
        F::Near
    } else {
        F::Miss
    };
    let doi_f = match (present(&r.cited_doi), present(&d.doi)) {
        (Some(a), Some(b)) => {
            if doi(a) == doi(b) {
                F::Exact
            } else {
                F::Miss
            }
        }
        _ => F::Absent,
    };
    let year = match r.cited_year {
        None => F::Absent,
        Some(y) if y == d.year => F::Exact,
        Some(y) if (y - d.year).abs() == 1 => F::Near,
        Some(_) => F::Miss,
    };
    let volume = match (r.cited_volume, d.volume) {
        (Some(a), Some(b)) => {
            if a == b {
                F::Exact
            } else {
                F::Miss
            }
        }
        _ => F::Absent,
    };
    let page_f = match (present(&r.cited_page), present(&d.first_page)) {
        (Some(a), Some(b)) => {
            if page(a) == page(b) {
                F::Exact
            } else {
                F::Miss
            }
        }
        _ => F::Absent,
    };
    Pair {
        doi: doi_f,
        title,
        year,
        volume,
        page: page_f,
        distance,
    }
}

fn best(mut cands: Vec<(&DocumentRecord, Pair)>) -> Option<(&DocumentRecord, Pair)> {
    cands.sort_by(|a, b| {
        b.1.score()
            .cmp(&a.1.score())
            .then(a.1.distance.cmp(&b.1.distance))
            .then(a.0.doc_id.cmp(&b.0.doc_id))
    });
    cands.into_iter().next()
}

/// (target doc, target journal, class, score) for one reference, scoring
/// every document in the corpus.
pub fn resolve(
    r: &RawReference,
    corpus: &Corpus,
    cfg: &ResolutionConfig,
) -> (Option<String>, Option<String>, MatchClass, Rational64) {
    let work = normalize(&r.cited_work, cfg.truncation_length);
    let docs: Vec<&DocumentRecord> = corpus.documents().collect();

    if cfg.doi_overrides_fields {
        if let Some(rd) = present(&r.cited_doi) {
            let hit = docs
                .iter()
                .filter(|d| present(&d.doi).is_some_and(|dd| doi(dd) == doi(rd)))
                .min_by(|a, b| a.doc_id.cmp(&b.doc_id));
            if let Some(d) = hit {
                let p = pair(r, &work, d, corpus, cfg);
                let agree = [p.doi, p.title, p.year, p.volume, p.page]
                    .iter()
                    .all(|f| matches!(f, F::Exact | F::Near | F::Absent));
                let class = if agree {
                    MatchClass::CompleteCorrect
                } else {
                    MatchClass::Faulty
                };
                return (Some(d.doc_id.clone()), None, class, p.score());
            }
        }
    }

    if r.cited_year.is_some() && r.cited_volume.is_some() && present(&r.cited_page).is_some() {
        let exact: Vec<_> = docs
            .iter()
            .map(|d| (*d, pair(r, &work, d, corpus, cfg)))
            .filter(|(_, p)| {
                p.distance == 0
                    && p.year == F::Exact
                    && p.volume == F::Exact
                    && p.page == F::Exact
                    && p.doi != F::Miss
            })
            .collect();
        if let Some((d, p)) = best(exact) {
            return (
                Some(d.doc_id.clone()),
                None,
                MatchClass::CompleteCorrect,
                p.score(),
            );
        }
    }

    let fuzzy: Vec<_> = docs
        .iter()
        .map(|d| (*d, pair(r, &work, d, corpus, cfg)))
        .filter(|(_, p)| {
            let loc = [p.year, p.volume, p.page];
            p.distance <= cfg.title_edit_distance_max
                && p.doi != F::Miss
                && loc.iter().filter(|f| **f == F::Exact).count() >= 2
                && loc.iter().all(|f| matches!(f, F::Exact | F::Absent))
        })
        .collect();
    if let Some((d, p)) = best(fuzzy) {
        return (
            Some(d.doc_id.clone()),
            None,
            MatchClass::IncompleteCorrect,
            p.score(),
        );
    }

    for j in corpus.journals() {
        let distance = journal_distance(&work, j, cfg);
        if distance > cfg.title_edit_distance_max {
            continue;
        }
        let year_bad = r.cited_year.is_some_and(|y| !covered(j, y));
        let vol_bad = match (r.cited_volume, r.cited_year, &j.volume_year_map) {
            (Some(v), Some(y), Some(map)) => map.iter().any(|e| e.volume == v && e.year != y),
            _ => false,
        };
        if year_bad || vol_bad {
            let mut present_w = 25 + if year_bad { 15 } else { 0 } + if vol_bad { 10 } else { 0 };
            if present(&r.cited_doi).is_some() {
                present_w += 40;
            }
            let score = Rational64::new(25, present_w);
            return (None, Some(j.journal_id.clone()), MatchClass::Faulty, score);
        }
    }
    (None, None, MatchClass::Ghost, Rational64::from_integer(0))
}

fn covered(j: &JournalRecord, year: i32) -> bool {
    if year < j.commencement_year {
        return false;
    }
    j.coverage.is_empty()
        || j.coverage
            .iter()
            .any(|c| year >= c.from_year && c.to_year.is_none_or(|t| year <= t))
}

/// Everything the library's link carries that the oracle can check.
pub fn link_view(l: &ResolvedLink) -> (Option<String>, Option<String>, MatchClass, Rational64) {
    (
        l.target_doc_id.clone(),
        l.target_journal_id.clone(),
        l.match_class,
        l.score,
    )
}

/// Journals grouped by shared ISSN, each group sorted; singletons when not merging.
pub fn groups(corpus: &Corpus, merge: bool) -> Vec<Vec<String>> {
    let ids: Vec<&JournalRecord> = corpus.journals().collect();
    let key = |s: &str| {
        s.chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_uppercase()
    };
    let mut label: Vec<usize> = (0..ids.len()).collect();
    if merge {
        // relabel until stable; quadratic, which is fine at test sizes
        loop {
            let mut changed = false;
            for a in 0..ids.len() {
                for b in 0..ids.len() {
                    let shared = ids[a]
                        .issns
                        .iter()
                        .any(|x| ids[b].issns.iter().any(|y| key(x) == key(y)));
                    if shared && label[b] > label[a] {
                        label[b] = label[a];
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    let mut out: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, j) in ids.iter().enumerate() {
        out.entry(label[i]).or_default().push(j.journal_id.clone());
    }
    out.into_values()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expected {
    Defined { numerator: u64, denominator: u64 },
    Undefined { numerator: u64 },
    MissingDocuments,
}

#[derive(PartialEq)]
enum Status {
    Covered,
    Gap,
    Before,
}

/// Enumerate every (citing document, reference, cohort year) triple for one
/// journal group.
pub fn index(
    corpus: &Corpus,
    links: &[ResolvedLink],
    cfg: &ResolutionConfig,
    members: &[String],
    spec: &IndexVariantSpec,
) -> Expected {
    let journals: Vec<&JournalRecord> =
        members.iter().map(|m| corpus.journal(m).unwrap()).collect();
    let titles: BTreeSet<String> = journals
        .iter()
        .flat_map(|j| {
            j.title_history
                .iter()
                .map(|t| normalize(&t.title, cfg.truncation_length))
        })
        .collect();
    let first = journals.iter().map(|j| j.commencement_year).min().unwrap();
    let status = |y: i32| {
        if journals.iter().any(|j| covered(j, y)) {
            Status::Covered
        } else if y < first {
            Status::Before
        } else {
            Status::Gap
        }
    };
    let census = spec.census_year;
    let years: Vec<i32> = (census - spec.window_years as i32..census).collect();

    let mut docs_by_year: BTreeMap<i32, u64> = BTreeMap::new();
    let mut cites_by_year: BTreeMap<i32, u64> = BTreeMap::new();
    for &y in &years {
        let st = status(y);
        let in_year = corpus
            .documents()
            .filter(|d| d.year == y && members.contains(&d.journal_id))
            .filter(|d| spec.denominator_mode == DenominatorMode::AllItems || d.is_citable());
        let n = in_year.count() as u64;
        let counted = match st {
            Status::Covered => n,
            Status::Gap if spec.suspension_policy == SuspensionPolicy::IncludeDocuments => {
                let any = corpus
                    .documents()
                    .any(|d| d.year == y && members.contains(&d.journal_id));
                if !any {
                    return Expected::MissingDocuments;
                }
                n
            }
            _ => 0,
        };
        docs_by_year.insert(y, counted);
        cites_by_year.insert(y, 0);
    }

    let self_by_title = |citing: &DocumentRecord| {
        corpus
            .journal(&citing.journal_id)
            .unwrap()
            .title_history
            .iter()
            .any(|t| titles.contains(&normalize(&t.title, cfg.truncation_length)))
    };
    match spec.numerator_mode {
        NumeratorMode::MM | NumeratorMode::AM => {
            for citing in corpus.documents().filter(|d| d.year == census) {
                if spec.numerator_mode == NumeratorMode::AM && !citing.is_citable() {
                    continue;
                }
                if spec.self_cites == SelfCites::Exclude && self_by_title(citing) {
                    continue;
                }
                for r in &citing.references {
                    let Some(y) = r.cited_year else { continue };
                    if years.contains(&y)
                        && titles.contains(&normalize(&r.cited_work, cfg.truncation_length))
                    {
                        *cites_by_year.get_mut(&y).unwrap() += 1;
                    }
                }
            }
        }
        NumeratorMode::OneOne => {
            for l in links {
                let verified = l.match_class == MatchClass::CompleteCorrect
                    || (l.match_class == MatchClass::IncompleteCorrect
                        && cfg.count_incomplete_in_g11);
                if !verified {
                    continue;
                }
                let citing = corpus.document(&l.citing_doc_id).unwrap();
                let Some(target) = l.target_doc_id.as_deref().and_then(|t| corpus.document(t))
                else {
                    continue;
                };
                if citing.year != census || !citing.is_citable() || !target.is_citable() {
                    continue;
                }
                if !members.contains(&target.journal_id) || !years.contains(&target.year) {
                    continue;
                }
                if spec.self_cites == SelfCites::Exclude && members.contains(&citing.journal_id) {
                    continue;
                }
                *cites_by_year.get_mut(&target.year).unwrap() += 1;
            }
        }
    }

    let mut numerator = 0;
    let mut denominator = 0;
    for &y in &years {
        let docs = docs_by_year[&y];
        let mut cites = cites_by_year[&y];
        if status(y) == Status::Gap && spec.suspension_policy == SuspensionPolicy::OmitCitations {
            cites = 0;
        }
        if docs == 0 && spec.suspension_policy != SuspensionPolicy::Ignore {
            cites = 0;
        }
        numerator += cites;
        denominator += docs;
    }
    if denominator == 0 {
        Expected::Undefined { numerator }
    } else {
        Expected::Defined {
            numerator,
            denominator,
        }
    }
}
