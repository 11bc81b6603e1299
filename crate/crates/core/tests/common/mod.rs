//! Fixtures shared by the integration tests.
#![allow(dead_code)]

pub mod oracle;

use std::path::PathBuf;

use garfield_core::corpus::{
    load_corpus, Author, Corpus, DocType, DocumentRecord, JournalRecord, RawReference, TitleSpan,
    VolumeYear, YearRange,
};
use garfield_core::resolver::{resolve_corpus, ResolutionConfig, ResolvedLink};

pub fn m1_paths() -> (PathBuf, PathBuf) {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/m1");
    (dir.join("journals.jsonl"), dir.join("documents.jsonl"))
}

pub fn m1() -> Corpus {
    let (j, d) = m1_paths();
    let (corpus, report) = load_corpus(&j, &d).expect("M1 loads");
    assert!(report.is_clean());
    corpus
}

pub fn resolved(corpus: &Corpus) -> Vec<ResolvedLink> {
    resolve_corpus(corpus, &ResolutionConfig::default())
}

pub fn journal(
    id: &str,
    title: &str,
    commencement: i32,
    coverage: Vec<YearRange>,
    issn: &str,
) -> JournalRecord {
    JournalRecord {
        journal_id: id.into(),
        issns: vec![issn.into()],
        title_history: vec![TitleSpan {
            title: title.into(),
            from_year: commencement,
            to_year: None,
        }],
        commencement_year: commencement,
        coverage,
        volume_year_map: None,
    }
}

pub fn open_from(year: i32) -> YearRange {
    YearRange {
        from_year: year,
        to_year: None,
    }
}

pub fn doc(
    id: &str,
    journal: &str,
    year: i32,
    volume: u32,
    page: u32,
    doc_type: DocType,
) -> DocumentRecord {
    DocumentRecord {
        doc_id: id.into(),
        journal_id: journal.into(),
        year,
        volume: Some(volume),
        first_page: Some(page.to_string()),
        doi: None,
        title: format!("Paper {id}"),
        authors: vec![Author {
            surname: format!("Author{id}"),
            initials: "A".into(),
        }],
        doc_type,
        references: Vec::new(),
    }
}

/// A reference carrying every locator of `target`, cited through `work`.
pub fn cite_doc(ref_index: u32, work: &str, target: &DocumentRecord) -> RawReference {
    RawReference {
        ref_index,
        cited_author: target.authors.first().cloned(),
        cited_work: work.into(),
        cited_year: Some(target.year),
        cited_volume: target.volume,
        cited_page: target.first_page.clone(),
        cited_doi: target.doi.clone(),
        cited_title: None,
    }
}

pub fn cite_year(ref_index: u32, work: &str, year: i32) -> RawReference {
    RawReference {
        ref_index,
        cited_author: None,
        cited_work: work.into(),
        cited_year: Some(year),
        cited_volume: None,
        cited_page: None,
        cited_doi: None,
        cited_title: None,
    }
}

pub fn with_refs(mut d: DocumentRecord, refs: Vec<RawReference>) -> DocumentRecord {
    d.references = refs;
    d
}

/// Journal "W" commenced 2005 but was not indexed until 2006. Ten documents
/// per year 2006-2009 and ten citations in 2010 to each of 2005-2009.
pub fn suspension_fixture() -> Corpus {
    let w = journal(
        "W",
        "World Journal of Wug",
        2005,
        vec![open_from(2006)],
        "3333-0001",
    );
    let c = journal(
        "C",
        "Citing Quarterly",
        1990,
        vec![open_from(1990)],
        "3333-0002",
    );
    let mut docs = Vec::new();
    for year in 2006..=2009 {
        for k in 0..10 {
            docs.push(doc(
                &format!("w{year}-{k}"),
                "W",
                year,
                (year - 2004) as u32,
                1 + 10 * k,
                DocType::Article,
            ));
        }
    }
    let mut refs = Vec::new();
    for year in 2005..=2009 {
        for _ in 0..10 {
            refs.push(cite_year(refs.len() as u32, "World Journal of Wug", year));
        }
    }
    docs.push(with_refs(
        doc("c1", "C", 2010, 21, 1, DocType::Article),
        refs,
    ));
    Corpus::new([w, c], docs).unwrap()
}

/// "O" (Forest Notes) becomes "R" (Forest Science Letters) in 2009, same ISSN.
/// O: 10 articles in 2008 cited 8 times in 2010; R: 2 articles in 2009 cited
/// 4 times. Three of O's citations come from R itself.
pub fn rename_fixture() -> Corpus {
    let mut old = journal(
        "O",
        "Forest Notes",
        1980,
        vec![YearRange::new(1980, 2008)],
        "4444-0001",
    );
    old.title_history[0].to_year = Some(2008);
    let new = journal(
        "R",
        "Forest Science Letters",
        2009,
        vec![open_from(2009)],
        "4444-0001",
    );
    let x = journal(
        "X",
        "Xylem Research",
        1990,
        vec![open_from(1990)],
        "4444-0009",
    );

    let mut docs = Vec::new();
    let olds: Vec<DocumentRecord> = (0..10)
        .map(|k| {
            doc(
                &format!("o{k}"),
                "O",
                2008,
                29,
                1 + 10 * k,
                DocType::Article,
            )
        })
        .collect();
    let news: Vec<DocumentRecord> = (0..2)
        .map(|k| {
            doc(
                &format!("n{k}"),
                "R",
                2009,
                30,
                1 + 10 * k,
                DocType::Article,
            )
        })
        .collect();
    // R cites O three times in 2010: a self-citation only across the lineage
    let r_refs = (0..3)
        .map(|i| cite_doc(i, "Forest Notes", &olds[i as usize]))
        .collect();
    docs.push(with_refs(
        doc("n2010", "R", 2010, 31, 1, DocType::Article),
        r_refs,
    ));
    let mut x_refs: Vec<RawReference> = (3..8)
        .map(|i| cite_doc(0, "Forest Notes", &olds[i]))
        .collect();
    x_refs.extend((0..4).map(|i| cite_doc(0, "Forest Science Letters", &news[i % 2])));
    for (i, r) in x_refs.iter_mut().enumerate() {
        r.ref_index = i as u32;
    }
    docs.push(with_refs(
        doc("x2010", "X", 2010, 50, 1, DocType::Article),
        x_refs,
    ));
    docs.extend(olds);
    docs.extend(news);
    Corpus::new([old, new, x], docs).unwrap()
}

/// One 2010 editorial in "M" makes 179 references to M's 2008-2009 articles;
/// 21 more citations come from articles in another journal.
pub fn editorial_fixture() -> Corpus {
    let m = journal(
        "M",
        "Molecular Musings",
        1992,
        vec![open_from(1992)],
        "5555-0001",
    );
    let o = journal(
        "Q",
        "Quantitative Letters",
        1990,
        vec![open_from(1990)],
        "5555-0002",
    );
    let mut docs: Vec<DocumentRecord> = Vec::new();
    let mut targets = Vec::new();
    for year in [2008, 2009] {
        for k in 0..10 {
            targets.push(doc(
                &format!("m{year}-{k}"),
                "M",
                year,
                (year - 1991) as u32,
                1 + 10 * k,
                DocType::Article,
            ));
        }
    }
    let ed_refs = (0..179)
        .map(|i| cite_doc(i, "Molecular Musings", &targets[i as usize % targets.len()]))
        .collect();
    docs.push(with_refs(
        doc("ed", "M", 2010, 19, 1, DocType::Editorial),
        ed_refs,
    ));
    for k in 0..21u32 {
        let refs = vec![cite_doc(
            0,
            "Molecular Musings",
            &targets[k as usize % targets.len()],
        )];
        docs.push(with_refs(
            doc(
                &format!("q{k}"),
                "Q",
                2010,
                40,
                1 + 10 * k,
                DocType::Article,
            ),
            refs,
        ));
    }
    docs.extend(targets);
    Corpus::new([m, o], docs).unwrap()
}

/// A reference to PLOS ONE 2005 (first published 2006) and one to
/// Forestry 3:17 (2008), when volume 3 belongs to 1929.
pub fn temporal_fixture() -> Corpus {
    let plos = journal("PLOS", "PLOS ONE", 2006, vec![open_from(2006)], "1932-6203");
    let mut forestry = journal("FOR", "Forestry", 1927, vec![open_from(1927)], "0015-752X");
    forestry.volume_year_map = Some(vec![
        VolumeYear {
            volume: 3,
            year: 1929,
        },
        VolumeYear {
            volume: 81,
            year: 2008,
        },
    ]);
    let citer = journal(
        "CIT",
        "Citing Review",
        1990,
        vec![open_from(1990)],
        "6666-0001",
    );
    let f2008 = doc("for2008", "FOR", 2008, 81, 17, DocType::Article);
    let p2006 = doc("plos2006", "PLOS", 2006, 1, 1, DocType::Article);
    let refs = vec![
        cite_year(0, "PLOS ONE", 2005),
        RawReference {
            cited_volume: Some(3),
            cited_page: Some("17".into()),
            ..cite_year(1, "Forestry", 2008)
        },
    ];
    let citing = with_refs(doc("cit1", "CIT", 2010, 20, 1, DocType::Article), refs);
    Corpus::new([plos, forestry, citer], [f2008, p2006, citing]).unwrap()
}
