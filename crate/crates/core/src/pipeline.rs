//! End-to-end runs: load, validate, dedupe, resolve, compute, stats, audit,
//! each stage writing its CSV outputs into one directory.

use std::fmt::Write as _;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::audit::{class_counts, run_audit, AuditConfig, AuditReport, CensusWindow};
use crate::corpus::{
    dedupe_documents, load_corpus, validate_corpus, Corpus, LoadError, LoadReport, MergeReport,
    ValidationIssue,
};
use crate::indices::{
    compute_index, journal_scopes, rank_journals, BootstrapConfig, DenominatorMode, IndexError,
    IndexInputs, IndexOptions, IndexResult, IndexVariantSpec, JournalScope, NumeratorMode,
    RoundingPolicy, SelfCites, SuspensionPolicy,
};
use crate::report::{self, DistributionRow, IndexRow, ReportError};
use crate::resolver::{resolve_corpus, MatchClass, ResolutionConfig, ResolvedLink};
use crate::stats::{
    accrual_curve_for_scope, cohort_citation_counts, distribution_summary, AccrualCurve,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Validate,
    Resolve,
    Compute,
    Stats,
    Audit,
    Report,
}

impl Stage {
    fn includes(self, other: Stage) -> bool {
        self == other || self == Stage::Report
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub journals: PathBuf,
    pub documents: PathBuf,
    pub out_dir: PathBuf,
    /// Reuse a links file from an earlier resolve run instead of resolving.
    pub links: Option<PathBuf>,
    pub resolution: ResolutionConfig,
    /// Defaults to the latest publication year in the corpus.
    pub census_year: Option<i32>,
    pub window_years: u32,
    pub numerators: Vec<NumeratorMode>,
    pub denominator: DenominatorMode,
    pub self_cites: SelfCites,
    pub suspension: SuspensionPolicy,
    pub merge_renames: bool,
    pub bootstrap: Option<BootstrapConfig>,
    pub rounding: RoundingPolicy,
    pub audit: AuditConfig,
    /// Exit 3 when a threshold audit flag fires.
    pub strict: bool,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            journals: PathBuf::from("journals.jsonl"),
            documents: PathBuf::from("documents.jsonl"),
            out_dir: PathBuf::from("out"),
            links: None,
            resolution: ResolutionConfig::default(),
            census_year: None,
            window_years: 2,
            numerators: vec![NumeratorMode::MM, NumeratorMode::AM, NumeratorMode::OneOne],
            denominator: DenominatorMode::CitableOnly,
            self_cites: SelfCites::Include,
            suspension: SuspensionPolicy::OmitCitations,
            merge_renames: true,
            bootstrap: None,
            rounding: RoundingPolicy::ThreeDecimal,
            audit: AuditConfig::default(),
            strict: false,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.resolution
            .validate()
            .map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.numerators.is_empty() {
            return Err(PipelineError::Config(
                "at least one numerator mode is required".into(),
            ));
        }
        if self.window_years == 0 {
            return Err(PipelineError::Config(
                "window must be at least one year".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(PipelineError::Config("threads must be at least 1".into()));
        }
        if let Some(b) = self.bootstrap {
            if b.replicates == 0 {
                return Err(PipelineError::Config(
                    "replicates must be at least 1".into(),
                ));
            }
            let one = num_rational::Rational64::from_integer(1);
            if b.level <= num_rational::Rational64::from_integer(0) || b.level > one {
                return Err(PipelineError::Config("level must lie in (0, 1]".into()));
            }
        }
        Ok(())
    }

    fn specs(&self, census_year: i32) -> Vec<IndexVariantSpec> {
        self.numerators
            .iter()
            .map(|&n| {
                IndexVariantSpec::new(census_year)
                    .with_numerator(n)
                    .with_denominator(self.denominator)
                    .with_self_cites(self.self_cites)
                    .with_window(self.window_years)
                    .with_suspension(self.suspension)
                    .with_merge_renames(self.merge_renames)
            })
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Load(_) | PipelineError::Index(IndexError::OverlapConflict { .. }) => 2,
            _ => 1,
        }
    }
}

/// Everything a run produced, for callers that want more than the files.
#[derive(Debug, Default)]
pub struct Outcome {
    pub exit_code: i32,
    pub summary: String,
    pub files: Vec<PathBuf>,
    pub load: LoadReport,
    pub validation: Vec<ValidationIssue>,
    pub merges: MergeReport,
    pub links: Vec<ResolvedLink>,
    pub census_year: Option<i32>,
    pub index_rows: Vec<IndexRow>,
    pub distribution: Vec<DistributionRow>,
    pub curves: Vec<AccrualCurve>,
    pub audit: AuditReport,
}

pub fn run(cfg: &RunConfig, stage: Stage) -> Result<Outcome, PipelineError> {
    cfg.validate()?;
    match cfg.threads {
        None => run_inner(cfg, stage),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::Config(e.to_string()))?
            .install(|| run_inner(cfg, stage)),
    }
}

fn run_inner(cfg: &RunConfig, stage: Stage) -> Result<Outcome, PipelineError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| PipelineError::Io { path, source }
    };
    fs::create_dir_all(&cfg.out_dir).map_err(io_err(&cfg.out_dir))?;
    let mut out = Outcome::default();
    let path = |name: &str| cfg.out_dir.join(name);

    let (raw, load) = load_corpus(&cfg.journals, &cfg.documents)?;
    let validation = validate_corpus(&raw);
    let (corpus, merges) = dedupe_documents(raw);
    if stage.includes(Stage::Validate) {
        report::write_load_report(&path("load_report.csv"), &load)?;
        report::write_validation(&path("validation.csv"), &validation)?;
        report::write_merges(&path("merges.csv"), &merges)?;
        out.files
            .extend(["load_report.csv", "validation.csv", "merges.csv"].map(path));
    }
    out.load = load;
    out.validation = validation;
    out.merges = merges;

    if stage == Stage::Validate {
        out.summary = summarize(cfg, &corpus, &out);
        return Ok(out);
    }

    let links = match &cfg.links {
        Some(p) if stage != Stage::Resolve => report::read_links(p)?,
        _ => resolve_corpus(&corpus, &cfg.resolution),
    };
    if stage.includes(Stage::Resolve) {
        report::write_links(&path("links.csv"), &links)?;
        out.files.push(path("links.csv"));
    }

    let census_year = cfg
        .census_year
        .or_else(|| corpus.documents().map(|d| d.year).max());
    out.census_year = census_year;
    let scopes = journal_scopes(&corpus, cfg.merge_renames)?;
    let inputs = IndexInputs::new(&corpus, &links, &cfg.resolution);

    if stage.includes(Stage::Compute) {
        if let Some(year) = census_year {
            out.index_rows = index_rows(cfg, &scopes, &inputs, year)?;
        }
        report::write_index_report(&path("indices.csv"), &out.index_rows)?;
        out.files.push(path("indices.csv"));
    }

    if stage.includes(Stage::Stats) {
        if let Some(year) = census_year {
            let spec = cfg.specs(year)[0];
            for scope in &scopes {
                let counts = cohort_citation_counts(scope, &inputs, year, spec.window());
                if let Ok(summary) = distribution_summary(&counts) {
                    out.distribution.push(DistributionRow {
                        journal_id: scope.id().to_string(),
                        census_year: year,
                        window: report::window_label(&spec),
                        summary,
                    });
                }
                for cohort in spec.window() {
                    if let Ok(curve) = accrual_curve_for_scope(scope, cohort, &inputs) {
                        out.curves.push(curve);
                    }
                }
            }
        }
        report::write_distribution(&path("distribution.csv"), &out.distribution)?;
        report::write_accrual(&path("accrual.csv"), &out.curves)?;
        out.files.push(path("distribution.csv"));
        out.files.push(path("accrual.csv"));
        let curves_dir = path("curves");
        fs::create_dir_all(&curves_dir).map_err(io_err(&curves_dir))?;
        for c in &out.curves {
            let file = curves_dir.join(format!(
                "{}_{}.tsv",
                file_stem(&c.journal_id),
                c.cohort_year
            ));
            let f = fs::File::create(&file).map_err(io_err(&file))?;
            report::write_curve_plot(BufWriter::new(f), c).map_err(io_err(&file))?;
            out.files.push(file);
        }
    }

    if stage.includes(Stage::Audit) {
        let window = census_year.map(|census_year| CensusWindow {
            census_year,
            window_years: cfg.window_years,
        });
        out.audit = run_audit(&scopes, &inputs, window, &cfg.audit);
        report::write_audit(&path("audit.csv"), &out.audit.flags)?;
        report::write_audit_journals(&path("audit_journals.csv"), &out.audit.journals)?;
        out.files.push(path("audit.csv"));
        out.files.push(path("audit_journals.csv"));
        if cfg.strict && out.audit.threshold_breached() {
            out.exit_code = 3;
        }
    }

    drop(inputs);
    out.links = links;
    out.summary = summarize(cfg, &corpus, &out);
    Ok(out)
}

/// Journal ids may contain characters that are awkward in file names.
fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '+' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn index_rows(
    cfg: &RunConfig,
    scopes: &[JournalScope],
    inputs: &IndexInputs,
    census_year: i32,
) -> Result<Vec<IndexRow>, PipelineError> {
    let options = IndexOptions {
        rounding: cfg.rounding,
        bootstrap: cfg.bootstrap,
    };
    let mut rows = Vec::new();
    for spec in cfg.specs(census_year) {
        spec.validate()?;
        let results: Vec<Result<IndexResult, IndexError>> = scopes
            .par_iter()
            .map(|scope| compute_index(scope, inputs, &spec, &options))
            .collect();
        let mut defined = Vec::new();
        let mut variant_rows = Vec::new();
        for (scope, res) in scopes.iter().zip(results) {
            match res {
                Ok(r) => defined.push(r),
                Err(IndexError::UndefinedIndex { numerator, .. }) => variant_rows.push(IndexRow {
                    journal_id: scope.id().to_string(),
                    spec,
                    numerator,
                    denominator: 0,
                    value: None,
                    ci: None,
                    display: crate::indices::UNDEFINED_DISPLAY.to_string(),
                    rank: None,
                }),
                Err(e) => return Err(e.into()),
            }
        }
        let ranked = rank_journals(&defined, cfg.rounding)?;
        for r in defined {
            let rank = ranked
                .iter()
                .find(|k| k.journal_id == r.journal_id)
                .map(|k| k.rank);
            variant_rows.push(IndexRow {
                journal_id: r.journal_id,
                spec,
                numerator: r.numerator,
                denominator: r.denominator,
                value: Some(r.value),
                ci: r.ci,
                display: r.display,
                rank,
            });
        }
        rows.extend(variant_rows);
    }
    let order = |m: NumeratorMode| cfg.numerators.iter().position(|n| *n == m);
    rows.sort_by(|a, b| {
        (&a.journal_id, order(a.spec.numerator_mode))
            .cmp(&(&b.journal_id, order(b.spec.numerator_mode)))
    });
    Ok(rows)
}

const SUMMARY_ROW_LIMIT: usize = 40;

fn summarize(cfg: &RunConfig, corpus: &Corpus, out: &Outcome) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "corpus: {} journals, {} documents, {} references ({} malformed lines, {} warnings, {} merges)",
        corpus.journal_count(),
        corpus.document_count(),
        corpus.reference_count(),
        out.load.malformed.len(),
        out.validation.len(),
        out.merges.merged.len(),
    );
    if !out.links.is_empty() {
        let counts = class_counts(&out.links);
        let part =
            |c: MatchClass| format!("{} {}", c.as_str(), counts.get(&c).copied().unwrap_or(0));
        let _ = writeln!(
            s,
            "links: {}, {}, {}, {}",
            part(MatchClass::CompleteCorrect),
            part(MatchClass::IncompleteCorrect),
            part(MatchClass::Faulty),
            part(MatchClass::Ghost),
        );
    }
    if !out.index_rows.is_empty() {
        let spec = out.index_rows[0].spec;
        let _ = writeln!(
            s,
            "census {}, window {}, denominator {}, self-cites {}",
            spec.census_year,
            report::window_label(&spec),
            cfg.denominator,
            cfg.self_cites
        );
        let _ = writeln!(
            s,
            "{:<16} {:<8} {:>8} {:>8} {:>10} {:>5}",
            "journal", "variant", "N", "D", "value", "rank"
        );
        for r in out.index_rows.iter().take(SUMMARY_ROW_LIMIT) {
            let _ = writeln!(
                s,
                "{:<16} {:<8} {:>8} {:>8} {:>10} {:>5}",
                r.journal_id,
                r.spec.numerator_mode.as_str(),
                r.numerator,
                r.denominator,
                r.display_or_na(),
                r.rank.map(|k| k.to_string()).unwrap_or_else(|| "-".into()),
            );
        }
        if out.index_rows.len() > SUMMARY_ROW_LIMIT {
            let _ = writeln!(
                s,
                "... {} more rows in indices.csv",
                out.index_rows.len() - SUMMARY_ROW_LIMIT
            );
        }
    }
    if !out.distribution.is_empty() || !out.curves.is_empty() {
        let _ = writeln!(
            s,
            "stats: {} distributions, {} accrual curves",
            out.distribution.len(),
            out.curves.len()
        );
    }
    if !out.audit.journals.is_empty() || !out.audit.flags.is_empty() {
        let over = out
            .audit
            .flags
            .iter()
            .filter(|f| f.code.is_threshold())
            .count();
        let _ = writeln!(
            s,
            "audit: {} flags, {} over threshold",
            out.audit.flags.len(),
            over
        );
    }
    s
}
