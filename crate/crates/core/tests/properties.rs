mod common;

use std::collections::BTreeSet;

use common::oracle::{self, Expected};
use garfield_core::audit::{run_audit, self_citation_report, AuditConfig, CensusWindow};
use garfield_core::corpus::{
    dedupe_documents, doi_key, load_corpus, write_corpus, Corpus, DocumentRecord,
};
use garfield_core::indices::{
    bootstrap_ci, compute_index, format_decimal, journal_scopes, DenominatorMode, IndexError,
    IndexInputs, IndexOptions, IndexVariantSpec, NumeratorMode, SelfCites, SuspensionPolicy,
};
use garfield_core::resolver::{resolve_corpus, MatchClass, ResolutionConfig, ResolvedLink};
use garfield_core::stats::{
    accrual_curve_for_scope, distribution_summary, suggest_window, AccrualCurve,
};
use garfield_core::synth::{generate, SynthConfig};
use num_rational::Rational64;
use proptest::prelude::*;

fn arb_synth() -> impl Strategy<Value = SynthConfig> {
    (
        any::<u64>(),
        1usize..=3,
        3i32..=5,
        1usize..=3,
        0usize..=5,
        prop::sample::select(vec![0.0, 0.3, 0.6]),
        0usize..=1,
        0usize..=1,
    )
        .prop_map(
            |(seed, journals, span, docs, refs, error_rate, renames, suspensions)| SynthConfig {
                seed,
                journals,
                first_year: 2000,
                last_year: 2000 + span - 1,
                docs_per_year: docs,
                refs_per_doc: refs,
                error_rate,
                self_cite_rate: 0.3,
                renames: renames.min(journals),
                suspensions,
            },
        )
}

fn arb_spec() -> impl Strategy<Value = IndexVariantSpec> {
    (
        2001i32..=2005,
        1u32..=4,
        prop::sample::select(vec![
            NumeratorMode::MM,
            NumeratorMode::AM,
            NumeratorMode::OneOne,
        ]),
        prop::sample::select(vec![
            DenominatorMode::CitableOnly,
            DenominatorMode::AllItems,
        ]),
        prop::sample::select(vec![SelfCites::Include, SelfCites::Exclude]),
        prop::sample::select(vec![
            SuspensionPolicy::OmitCitations,
            SuspensionPolicy::IncludeDocuments,
            SuspensionPolicy::Ignore,
        ]),
        any::<bool>(),
    )
        .prop_map(|(y, w, n, d, s, p, m)| {
            IndexVariantSpec::new(y)
                .with_window(w)
                .with_numerator(n)
                .with_denominator(d)
                .with_self_cites(s)
                .with_suspension(p)
                .with_merge_renames(m)
        })
}

fn arb_resolution() -> impl Strategy<Value = ResolutionConfig> {
    (
        0usize..=3,
        prop::sample::select(vec![4usize, 12, 20]),
        any::<bool>(),
        any::<bool>(),
    )
        .prop_map(|(max, trunc, incomplete, doi)| ResolutionConfig {
            title_edit_distance_max: max,
            truncation_length: trunc,
            count_incomplete_in_g11: incomplete,
            doi_overrides_fields: doi,
        })
}

fn expected_of(r: Result<garfield_core::indices::IndexResult, IndexError>) -> Expected {
    match r {
        Ok(r) => Expected::Defined {
            numerator: r.numerator,
            denominator: r.denominator,
        },
        Err(IndexError::UndefinedIndex { numerator, .. }) => Expected::Undefined { numerator },
        Err(IndexError::MissingDocuments { .. }) => Expected::MissingDocuments,
        Err(e) => panic!("unexpected {e}"),
    }
}

fn numerator(e: &Expected) -> Option<u64> {
    match e {
        Expected::Defined { numerator, .. } | Expected::Undefined { numerator } => Some(*numerator),
        Expected::MissingDocuments => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn resolver_agrees_with_brute_force(synth in arb_synth(), cfg in arb_resolution()) {
        let c = generate(&synth);
        let links = resolve_corpus(&c, &cfg);
        prop_assert_eq!(links.len(), c.reference_count());
        let mut i = 0;
        for d in c.documents() {
            for r in &d.references {
                let l = &links[i];
                prop_assert_eq!((&l.citing_doc_id, l.ref_index), (&d.doc_id, r.ref_index));
                prop_assert_eq!(oracle::link_view(l), oracle::resolve(r, &c, &cfg), "{}", l.key());
                i += 1;
            }
        }
    }

    #[test]
    fn resolver_invariants(synth in arb_synth()) {
        let c = generate(&synth);
        let base = ResolutionConfig::default();
        let links = resolve_corpus(&c, &base);
        prop_assert_eq!(&links, &resolve_corpus(&c, &base));

        // DOI supremacy
        for l in &links {
            let d = c.document(&l.citing_doc_id).unwrap();
            let r = d.references.iter().find(|r| r.ref_index == l.ref_index).unwrap();
            if let Some(doi) = r.cited_doi.as_deref() {
                if let Some(first) = c.docs_by_doi(&doi_key(doi)).first() {
                    prop_assert_eq!(l.target_doc_id.as_deref(), Some(first.as_str()));
                }
            }
            match l.match_class {
                MatchClass::Ghost => prop_assert!(l.target_doc_id.is_none()),
                MatchClass::CompleteCorrect | MatchClass::IncompleteCorrect => prop_assert!(l.target_doc_id.is_some()),
                MatchClass::Faulty => {}
            }
            prop_assert!(l.score >= Rational64::from_integer(0) && l.score <= Rational64::from_integer(1));
        }

        // tightening the title threshold never makes a link more correct
        let by_class = |links: &[ResolvedLink], class| -> BTreeSet<String> {
            links.iter().filter(|l| l.match_class == class).map(ResolvedLink::key).collect()
        };
        let mut prev = resolve_corpus(&c, &ResolutionConfig { title_edit_distance_max: 3, ..base.clone() });
        for max in (0..3).rev() {
            let next = resolve_corpus(&c, &ResolutionConfig { title_edit_distance_max: max, ..base.clone() });
            prop_assert!(by_class(&next, MatchClass::CompleteCorrect).is_subset(&by_class(&prev, MatchClass::CompleteCorrect)));
            prop_assert!(by_class(&prev, MatchClass::Ghost).is_subset(&by_class(&next, MatchClass::Ghost)));
            prev = next;
        }
    }

    #[test]
    fn indices_agree_with_triple_enumeration(synth in arb_synth(), spec in arb_spec()) {
        let c = generate(&synth);
        let cfg = ResolutionConfig::default();
        let links = resolve_corpus(&c, &cfg);
        let inputs = IndexInputs::new(&c, &links, &cfg);
        let scopes = journal_scopes(&c, spec.merge_renames).unwrap();
        let groups = oracle::groups(&c, spec.merge_renames);
        prop_assert_eq!(scopes.iter().map(|s| s.members.clone()).collect::<Vec<_>>(), groups.clone());
        let opts = IndexOptions::default();
        for scope in &scopes {
            let got = expected_of(compute_index(scope, &inputs, &spec, &opts));
            let want = oracle::index(&c, &links, &cfg, &scope.members, &spec);
            prop_assert_eq!(&got, &want, "{} {:?}", scope.id(), spec);

            if let Ok(res) = compute_index(scope, &inputs, &spec, &opts) {
                prop_assert_eq!(res.value, Rational64::new(res.numerator as i64, res.denominator as i64));
                prop_assert_eq!(res.per_year_breakdown.iter().map(|y| y.cites).sum::<u64>(), res.numerator);
                prop_assert_eq!(res.per_year_breakdown.iter().map(|y| y.docs).sum::<u64>(), res.denominator);
                if spec.suspension_policy != SuspensionPolicy::Ignore {
                    for y in &res.per_year_breakdown {
                        prop_assert!(y.cites == 0 || y.docs > 0, "like-with-like at {}", y.year);
                    }
                }
            }

            let n = |m: NumeratorMode| numerator(&expected_of(compute_index(scope, &inputs, &spec.with_numerator(m), &opts)));
            if let (Some(mm), Some(am), Some(one)) = (n(NumeratorMode::MM), n(NumeratorMode::AM), n(NumeratorMode::OneOne)) {
                prop_assert!(am <= mm);
                if synth.error_rate == 0.0 {
                    prop_assert!(one <= am, "clean ordering {} <= {}", one, am);
                }
            }
            let incl = numerator(&expected_of(compute_index(scope, &inputs, &spec.with_self_cites(SelfCites::Include), &opts)));
            let excl = numerator(&expected_of(compute_index(scope, &inputs, &spec.with_self_cites(SelfCites::Exclude), &opts)));
            if let (Some(i), Some(e)) = (incl, excl) {
                prop_assert!(e <= i);
            }
            let d = |m| match expected_of(compute_index(scope, &inputs, &spec.with_denominator(m), &opts)) {
                Expected::Defined { denominator, .. } => Some(denominator),
                Expected::Undefined { .. } => Some(0),
                Expected::MissingDocuments => None,
            };
            if let (Some(all), Some(cit)) = (d(DenominatorMode::AllItems), d(DenominatorMode::CitableOnly)) {
                prop_assert!(all >= cit);
            }
        }
    }

    #[test]
    fn corpus_round_trips(synth in arb_synth()) {
        let c = generate(&synth);
        let dir = tempfile::tempdir().unwrap();
        let (j, d) = (dir.path().join("j.jsonl"), dir.path().join("d.jsonl"));
        write_corpus(&c, &j, &d).unwrap();
        let (back, report) = load_corpus(&j, &d).unwrap();
        prop_assert!(report.is_clean());
        prop_assert_eq!(back, c);
    }

    #[test]
    fn dedupe_collapses_copies_and_is_idempotent(synth in arb_synth(), picks in prop::collection::vec(any::<prop::sample::Index>(), 0..4)) {
        let c = generate(&synth);
        let (once, _) = dedupe_documents(c.clone());
        let (twice, report) = dedupe_documents(once.clone());
        prop_assert_eq!(&twice, &once);
        prop_assert!(report.is_empty());

        if c.document_count() == 0 {
            return Ok(());
        }
        let docs: Vec<DocumentRecord> = c.documents().cloned().collect();
        let mut extra = Vec::new();
        for (k, p) in picks.iter().enumerate() {
            let mut copy = p.get(&docs).clone();
            copy.doc_id = format!("zz-copy-{k}-{}", copy.doc_id);
            copy.doi = None;
            copy.title.clear();
            extra.push(copy);
        }
        let journals: Vec<_> = c.journals().cloned().collect();
        let dirty = Corpus::new(journals, docs.iter().cloned().chain(extra)).unwrap();
        let (clean, _) = dedupe_documents(dirty);
        let (again, _) = dedupe_documents(clean.clone());
        prop_assert_eq!(&again, &clean);
        prop_assert_eq!(clean.document_count(), once.document_count());
        let dois: Vec<String> = clean.documents().filter_map(|d| d.doi.as_deref().map(doi_key)).collect();
        prop_assert_eq!(dois.iter().collect::<BTreeSet<_>>().len(), dois.len());
    }

    #[test]
    fn summary_matches_naive_pass(counts in prop::collection::vec(0u64..40, 1..60)) {
        let s = distribution_summary(&counts).unwrap();
        let n = counts.len();
        let total: u64 = counts.iter().sum();
        let mut freq = std::collections::BTreeMap::new();
        let (mut min, mut max, mut zeros) = (u64::MAX, 0, 0);
        for &c in &counts {
            *freq.entry(c).or_insert(0usize) += 1;
            min = min.min(c);
            max = max.max(c);
            zeros += usize::from(c == 0);
        }
        let top = *freq.values().max().unwrap();
        let mode = *freq.iter().find(|(_, f)| **f == top).unwrap().0;
        let mut sorted = counts.clone();
        sorted.sort();
        let median = if n % 2 == 1 {
            Rational64::from_integer(sorted[n / 2] as i64)
        } else {
            Rational64::new((sorted[n / 2 - 1] + sorted[n / 2]) as i64, 2)
        };
        prop_assert_eq!(s.mean * Rational64::from_integer(n as i64), Rational64::from_integer(total as i64));
        prop_assert_eq!((s.mode, s.min, s.max, s.median), (mode, min, max, median));
        prop_assert_eq!(s.share_uncited, Rational64::new(zeros as i64, n as i64));
        prop_assert!(s.min <= s.mode && s.mode <= s.max);
    }

    #[test]
    fn accrual_totals_count_every_verified_citation(synth in arb_synth()) {
        let c = generate(&synth);
        let cfg = ResolutionConfig::default();
        let links = resolve_corpus(&c, &cfg);
        let inputs = IndexInputs::new(&c, &links, &cfg);
        for scope in journal_scopes(&c, true).unwrap() {
            for year in synth.first_year..=synth.last_year {
                let Ok(curve) = accrual_curve_for_scope(&scope, year, &inputs) else { continue };
                let expected = links
                    .iter()
                    .filter(|l| l.is_verified(true))
                    .filter_map(|l| l.target_doc_id.as_deref().and_then(|t| c.document(t)))
                    .filter(|t| t.year == year && t.is_citable() && scope.contains(&t.journal_id))
                    .count() as u64;
                prop_assert_eq!(curve.total() + curve.predating.len() as u64, expected);
                let top = curve.counts_by_offset.iter().map(|(_, c)| *c).max().unwrap_or(0);
                prop_assert_eq!(curve.count_at(curve.peak_offset), top);
                prop_assert!(curve.counts_by_offset.iter().all(|(o, c)| *o >= curve.peak_offset || *c < top));
            }
        }
    }

    #[test]
    fn suggested_window_grows_with_target(counts in prop::collection::vec(0u64..20, 1..15), a in 1i64..=100, b in 1i64..=100) {
        let curve = AccrualCurve::from_counts("J", 2000, counts.iter().enumerate().map(|(i, c)| (i as u32 + 1, *c)));
        let (lo, hi) = (a.min(b), a.max(b));
        match (suggest_window(&curve, Rational64::new(lo, 100)), suggest_window(&curve, Rational64::new(hi, 100))) {
            (Ok(w1), Ok(w2)) => prop_assert!(w1 <= w2 && w1 >= 1),
            (Err(e1), Err(e2)) => prop_assert_eq!(e1, e2),
            other => prop_assert!(false, "inconsistent {:?}", other),
        }
    }

    #[test]
    fn audit_is_reproducible_and_consistent(synth in arb_synth()) {
        let c = generate(&synth);
        let cfg = ResolutionConfig::default();
        let links = resolve_corpus(&c, &cfg);
        let inputs = IndexInputs::new(&c, &links, &cfg);
        let scopes = journal_scopes(&c, true).unwrap();
        let window = CensusWindow { census_year: synth.last_year, window_years: 2 };
        let audit = AuditConfig::default();
        let a = run_audit(&scopes, &inputs, Some(window), &audit);
        prop_assert_eq!(&a, &run_audit(&scopes, &inputs, Some(window), &audit));

        for scope in &scopes {
            if let Ok(rep) = self_citation_report(scope, &inputs, window, &audit) {
                prop_assert_eq!(rep.by_source.iter().map(|(_, n)| n).sum::<u64>(), rep.total);
            }
        }

        // dropping editorial-origin links never raises the OneOne index
        let kept: Vec<ResolvedLink> = links
            .iter()
            .filter(|l| c.document(&l.citing_doc_id).is_some_and(|d| d.is_citable()))
            .cloned()
            .collect();
        let trimmed = IndexInputs::new(&c, &kept, &cfg);
        let spec = IndexVariantSpec::new(synth.last_year);
        for scope in &scopes {
            let before = compute_index(scope, &inputs, &spec, &IndexOptions::default());
            let after = compute_index(scope, &trimmed, &spec, &IndexOptions::default());
            if let (Ok(b), Ok(a)) = (before, after) {
                prop_assert!(a.value <= b.value);
            }
        }
    }

    #[test]
    fn bootstrap_brackets_the_mean(counts in prop::collection::vec(0u64..30, 1..40), seed in any::<u64>()) {
        let (lo, hi) = bootstrap_ci(&counts, Rational64::new(95, 100), 200, seed).unwrap();
        let mean = Rational64::new(counts.iter().sum::<u64>() as i64, counts.len() as i64);
        let min = Rational64::from_integer(*counts.iter().min().unwrap() as i64);
        let max = Rational64::from_integer(*counts.iter().max().unwrap() as i64);
        prop_assert!(min <= lo && lo <= hi && hi <= max);
        prop_assert_eq!((lo, hi), bootstrap_ci(&counts, Rational64::new(95, 100), 200, seed).unwrap());
        // the percentile interval of resampled means can miss the sample mean only
        // for tiny skewed samples; it never does when every value is equal
        if counts.iter().all(|c| *c == counts[0]) {
            prop_assert_eq!((lo, hi), (mean, mean));
        }
    }

    #[test]
    fn displayed_value_is_within_half_a_unit(n in 0i64..100_000, d in 1i64..10_000) {
        let v = Rational64::new(n, d);
        for decimals in [1u32, 3] {
            let shown = format_decimal(v, decimals);
            let (whole, frac) = shown.split_once('.').unwrap();
            prop_assert_eq!(frac.len(), decimals as usize);
            let scale = 10i64.pow(decimals);
            let parsed = Rational64::new(whole.parse::<i64>().unwrap() * scale + frac.parse::<i64>().unwrap(), scale);
            let err = (parsed - v) * Rational64::from_integer(2 * scale);
            prop_assert!(err <= Rational64::from_integer(1) && err > Rational64::from_integer(-1));
        }
    }
}

#[test]
fn oracle_edit_distance_table() {
    assert_eq!(oracle::levenshtein("ACTA ALPHA", "ACTA ALHPA"), 2);
    assert_eq!(oracle::levenshtein("", "abc"), 3);
    assert_eq!(oracle::levenshtein("kitten", "sitting"), 3);
    assert_eq!(
        oracle::normalize("Modelling Forest Growth and Yield", 20),
        "MODELLING FOREST GRO"
    );
}

/// Interval width shrinks with cohort size, averaged over seeds.
#[test]
fn ci_narrows_as_cohort_grows() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut sample = |n: usize| (0..n).map(|_| rng.gen_range(0..10u64)).collect::<Vec<_>>();
    let (small, large) = (sample(10), sample(400));
    let width = |counts: &[u64]| {
        (0..20u64)
            .map(|seed| {
                let (lo, hi) = bootstrap_ci(counts, Rational64::new(95, 100), 300, seed).unwrap();
                hi - lo
            })
            .sum::<Rational64>()
    };
    assert!(width(&large) < width(&small));
}
