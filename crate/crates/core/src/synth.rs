//! Seeded synthetic corpora for property checks and throughput runs.
//!
//! Journal titles are kept far apart in edit distance so a two-edit typo of
//! one title can never land near another. Pages are spaced ten apart so no two
//! documents look like duplicate records of each other.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    Author, Corpus, DocType, DocumentRecord, JournalRecord, RawReference, TitleSpan, VolumeYear,
    YearRange,
};
use crate::resolver::normalize_work_title;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub journals: usize,
    pub first_year: i32,
    pub last_year: i32,
    pub docs_per_year: usize,
    pub refs_per_doc: usize,
    /// Share of references carrying a deliberate error; 0 gives a clean corpus.
    pub error_rate: f64,
    /// Chance a reference targets the citing document's own journal.
    pub self_cite_rate: f64,
    /// Number of journals that change title halfway through (new id, same ISSN).
    pub renames: usize,
    /// Number of journals with a one-year indexing gap halfway through.
    pub suspensions: usize,
}

impl SynthConfig {
    /// At most 45 documents.
    pub fn small(seed: u64) -> Self {
        SynthConfig {
            seed,
            journals: 3,
            first_year: 2005,
            last_year: 2009,
            docs_per_year: 3,
            refs_per_doc: 4,
            error_rate: 0.3,
            self_cite_rate: 0.3,
            renames: 0,
            suspensions: 0,
        }
    }

    /// 10,000 documents and 100,000 references.
    pub fn large(seed: u64) -> Self {
        SynthConfig {
            seed,
            journals: 40,
            first_year: 2000,
            last_year: 2009,
            docs_per_year: 25,
            refs_per_doc: 10,
            error_rate: 0.2,
            self_cite_rate: 0.2,
            renames: 2,
            suspensions: 2,
        }
    }

    pub fn clean(mut self) -> Self {
        self.error_rate = 0.0;
        self
    }
}

const SYLLABLES: [&str; 16] = [
    "ba", "ko", "ri", "te", "mu", "sa", "ne", "lo", "vi", "da", "ge", "pu", "zo", "fi", "ha", "ju",
];
const SURNAMES: [&str; 16] = [
    "Abbott", "Baker", "Chen", "Dubois", "Eriksen", "Fischer", "Garcia", "Horvat", "Ito", "Jensen",
    "Kowalski", "Larsen", "Moreau", "Nakamura", "Okafor", "Petrov",
];
const MIN_TITLE_SEPARATION: usize = 6;

fn word(rng: &mut ChaCha8Rng) -> String {
    let mut w: String = (0..3)
        .map(|_| *SYLLABLES.choose(rng).expect("non-empty"))
        .collect();
    w[..1].make_ascii_uppercase();
    w
}

fn distinct_titles(rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
    let mut titles: Vec<String> = Vec::with_capacity(n);
    let mut keys: Vec<String> = Vec::with_capacity(n);
    while titles.len() < n {
        let t = format!("Acta {} {}", word(rng), word(rng));
        let k = normalize_work_title(&t, 20);
        if keys
            .iter()
            .all(|o| strsim::levenshtein(o, &k) >= MIN_TITLE_SEPARATION)
        {
            keys.push(k);
            titles.push(t);
        }
    }
    titles
}

/// Swap two adjacent letters inside the first 18 characters: at most two edits.
fn typo(rng: &mut ChaCha8Rng, title: &str) -> String {
    let mut chars: Vec<char> = title.chars().collect();
    let spots: Vec<usize> = (0..chars.len().saturating_sub(1).min(18))
        .filter(|&i| {
            chars[i].is_ascii_alphabetic()
                && chars[i + 1].is_ascii_alphabetic()
                && !chars[i].eq_ignore_ascii_case(&chars[i + 1])
        })
        .collect();
    if let Some(&i) = spots.choose(rng) {
        chars.swap(i, i + 1);
    }
    chars.into_iter().collect()
}

#[derive(Clone, Copy)]
enum Flaw {
    Typo,
    MissingPage,
    WrongPage,
    PreCommencement,
    VolumeMismatch,
    Artifact,
}

const FLAWS: [Flaw; 6] = [
    Flaw::Typo,
    Flaw::MissingPage,
    Flaw::WrongPage,
    Flaw::PreCommencement,
    Flaw::VolumeMismatch,
    Flaw::Artifact,
];

pub fn generate(cfg: &SynthConfig) -> Corpus {
    assert!(cfg.first_year <= cfg.last_year, "empty year range");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n_titles = cfg.journals + cfg.renames.min(cfg.journals);
    let titles = distinct_titles(&mut rng, n_titles);
    let mid = cfg.first_year + (cfg.last_year - cfg.first_year + 1) / 2;

    // (journal id for a given year) per base journal
    let mut journals: Vec<JournalRecord> = Vec::new();
    let mut owner: Vec<Vec<(i32, usize)>> = Vec::new(); // base -> (from_year, journal index)
    for j in 0..cfg.journals {
        let commencement = cfg.first_year - rng.gen_range(0..5);
        let issn = format!("{:04}-{:04}", 1000 + j, rng.gen_range(0..10_000));
        let volumes = |from: i32, to: i32| {
            (from..=to)
                .map(|y| VolumeYear {
                    volume: (y - commencement + 1) as u32,
                    year: y,
                })
                .collect::<Vec<_>>()
        };
        let id = format!("J{j:03}");
        let renamed = j < cfg.renames && mid > cfg.first_year;
        let suspended = !renamed && j < cfg.renames + cfg.suspensions && mid < cfg.last_year;
        if renamed {
            let successor = cfg.journals + j;
            journals.push(JournalRecord {
                journal_id: id.clone(),
                issns: vec![issn.clone()],
                title_history: vec![TitleSpan {
                    title: titles[j].clone(),
                    from_year: commencement,
                    to_year: Some(mid - 1),
                }],
                commencement_year: commencement,
                coverage: vec![YearRange::new(commencement, mid - 1)],
                volume_year_map: Some(volumes(commencement, mid - 1)),
            });
            let first = journals.len() - 1;
            journals.push(JournalRecord {
                journal_id: format!("{id}R"),
                issns: vec![issn],
                title_history: vec![TitleSpan {
                    title: titles[successor].clone(),
                    from_year: mid,
                    to_year: None,
                }],
                commencement_year: mid,
                coverage: vec![YearRange {
                    from_year: mid,
                    to_year: None,
                }],
                volume_year_map: Some(volumes(mid, cfg.last_year)),
            });
            owner.push(vec![(i32::MIN, first), (mid, journals.len() - 1)]);
        } else {
            let coverage = if suspended {
                vec![
                    YearRange::new(commencement, mid - 1),
                    YearRange {
                        from_year: mid + 1,
                        to_year: None,
                    },
                ]
            } else {
                vec![YearRange {
                    from_year: commencement,
                    to_year: None,
                }]
            };
            journals.push(JournalRecord {
                journal_id: id,
                issns: vec![issn],
                title_history: vec![TitleSpan {
                    title: titles[j].clone(),
                    from_year: commencement,
                    to_year: None,
                }],
                commencement_year: commencement,
                coverage,
                volume_year_map: Some(volumes(commencement, cfg.last_year)),
            });
            owner.push(vec![(i32::MIN, journals.len() - 1)]);
        }
    }
    let journal_for = |base: usize, year: i32| {
        owner[base]
            .iter()
            .rev()
            .find(|(from, _)| year >= *from)
            .map(|(_, j)| *j)
            .expect("first entry starts at MIN")
    };

    // documents, without references yet
    let mut docs: Vec<DocumentRecord> = Vec::new();
    let mut by_year: Vec<Vec<usize>> =
        vec![Vec::new(); (cfg.last_year - cfg.first_year + 1) as usize];
    let mut base_of: Vec<usize> = Vec::new();
    for base in 0..cfg.journals {
        for year in cfg.first_year..=cfg.last_year {
            let j = &journals[journal_for(base, year)];
            let volume = (year - journals[owner[base][0].1].commencement_year + 1) as u32;
            for k in 0..cfg.docs_per_year {
                let doc_id = format!("{}-{year}-{k:03}", j.journal_id);
                let doc_type = match rng.gen_range(0..20) {
                    0..=13 => DocType::Article,
                    14 | 15 => DocType::Review,
                    16 | 17 => DocType::Editorial,
                    18 => DocType::Letter,
                    _ => DocType::News,
                };
                let doi = rng
                    .gen_bool(0.6)
                    .then(|| format!("10.{}/{doc_id}", 5000 + base));
                let authors = (0..rng.gen_range(1..=3))
                    .map(|_| Author {
                        surname: SURNAMES.choose(&mut rng).expect("non-empty").to_string(),
                        initials: ((b'A' + rng.gen_range(0..26)) as char).to_string(),
                    })
                    .collect();
                by_year[(year - cfg.first_year) as usize].push(docs.len());
                base_of.push(base);
                docs.push(DocumentRecord {
                    doc_id,
                    journal_id: j.journal_id.clone(),
                    year,
                    volume: Some(volume),
                    first_page: Some((1 + 10 * k).to_string()),
                    doi,
                    title: format!("Study {k} of {year}"),
                    authors,
                    doc_type,
                    references: Vec::new(),
                });
            }
        }
    }

    let title_of = |j: usize| journals[j].title_history[0].title.clone();
    for i in 0..docs.len() {
        let year = docs[i].year;
        let lo = (year - 6).max(cfg.first_year);
        let pool: Vec<usize> = (lo..year)
            .flat_map(|y| by_year[(y - cfg.first_year) as usize].iter().copied())
            .collect();
        let mut refs = Vec::with_capacity(cfg.refs_per_doc);
        for ref_index in 0..cfg.refs_per_doc as u32 {
            let artifact = RawReference {
                ref_index,
                cited_author: None,
                cited_work: "TEST".into(),
                cited_year: Some(year - 1),
                cited_volume: Some(1),
                cited_page: Some("1".into()),
                cited_doi: None,
                cited_title: None,
            };
            if pool.is_empty() {
                // first year of the range has nothing earlier to cite
                refs.push(RawReference {
                    cited_work: "Unindexed Monographs".into(),
                    ..artifact
                });
                continue;
            }
            let own: Vec<usize> = pool
                .iter()
                .copied()
                .filter(|&t| base_of[t] == base_of[i])
                .collect();
            let t = if !own.is_empty() && rng.gen_bool(cfg.self_cite_rate) {
                *own.choose(&mut rng).expect("non-empty")
            } else {
                *pool.choose(&mut rng).expect("non-empty")
            };
            let target = &docs[t];
            let tj = journals
                .iter()
                .position(|j| j.journal_id == target.journal_id)
                .expect("known");
            let mut r = RawReference {
                ref_index,
                cited_author: target.authors.first().cloned(),
                cited_work: title_of(tj),
                cited_year: Some(target.year),
                cited_volume: target.volume,
                cited_page: target.first_page.clone(),
                cited_doi: target.doi.clone().filter(|_| rng.gen_bool(0.5)),
                cited_title: None,
            };
            if cfg.error_rate > 0.0 && rng.gen_bool(cfg.error_rate) {
                match *FLAWS.choose(&mut rng).expect("non-empty") {
                    Flaw::Typo => {
                        r.cited_work = typo(&mut rng, &r.cited_work);
                        r.cited_doi = None;
                    }
                    Flaw::MissingPage => {
                        r.cited_page = None;
                        r.cited_doi = None;
                    }
                    Flaw::WrongPage => {
                        r.cited_page = Some("9999".into());
                        r.cited_doi = None;
                    }
                    Flaw::PreCommencement => {
                        r.cited_year = Some(journals[tj].commencement_year - 3);
                        r.cited_volume = None;
                        r.cited_doi = None;
                    }
                    Flaw::VolumeMismatch => {
                        r.cited_volume = r.cited_volume.map(|v| v + 7);
                        if r.cited_doi.is_none() {
                            r.cited_doi = target.doi.clone();
                        }
                    }
                    Flaw::Artifact => r = artifact,
                }
            }
            refs.push(r);
        }
        docs[i].references = refs;
    }

    Corpus::new(journals, docs).expect("generated ids are unique and known")
}
