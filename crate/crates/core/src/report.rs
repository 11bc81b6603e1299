//! CSV report files. Every writer emits its header even when there are no rows.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use num_rational::Rational64;
use thiserror::Error;

use crate::audit::{AuditFlag, JournalAudit};
use crate::corpus::{LoadReport, MergeReport, ValidationIssue};
use crate::indices::{format_decimal, IndexVariantSpec, UNDEFINED_DISPLAY};
use crate::resolver::{FieldEvidence, MatchClass, ResolvedLink};
use crate::stats::{AccrualCurve, DistributionSummary};

pub const LOAD_REPORT_HEADER: [&str; 3] = ["file", "line", "reason"];
pub const VALIDATION_HEADER: [&str; 4] = ["severity", "code", "subject", "message"];
pub const MERGE_HEADER: [&str; 3] = ["kind", "survivor", "doc_ids"];
pub const LINKS_HEADER: [&str; 6] = [
    "citing_doc_id",
    "ref_index",
    "target_doc_id",
    "target_journal_id",
    "match_class",
    "score",
];
pub const INDEX_HEADER: [&str; 12] = [
    "journal_id",
    "numerator_mode",
    "denominator_mode",
    "self_cites",
    "window",
    "N",
    "D",
    "value",
    "ci_low",
    "ci_high",
    "display",
    "rank",
];
pub const DISTRIBUTION_HEADER: [&str; 11] = [
    "journal_id",
    "census_year",
    "window",
    "n_docs",
    "mean",
    "median",
    "mode",
    "min",
    "max",
    "share_uncited",
    "total_citations",
];
pub const ACCRUAL_HEADER: [&str; 5] = [
    "journal_id",
    "cohort_year",
    "offset",
    "count",
    "peak_offset",
];
pub const AUDIT_HEADER: [&str; 5] = ["code", "subject", "magnitude", "detail", "evidence_ids"];
pub const AUDIT_JOURNAL_HEADER: [&str; 4] = [
    "journal_id",
    "self_citation_rate",
    "editorial_share",
    "citing_error_rate",
];

/// Decimal places used for full-precision numeric columns.
pub const FULL_PRECISION: u32 = 12;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{path}: line {line}: {reason}")]
    BadRow {
        path: String,
        line: u64,
        reason: String,
    },
}

/// Exact value rounded to [`FULL_PRECISION`] places, trailing zeros trimmed.
pub fn full_precision(value: Rational64) -> String {
    let s = format_decimal(value, FULL_PRECISION);
    let trimmed = s.trim_end_matches('0');
    if trimmed.ends_with('.') {
        format!("{trimmed}0")
    } else {
        trimmed.to_string()
    }
}

fn opt_rational(v: Option<Rational64>) -> String {
    v.map(full_precision).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<File>, ReportError> {
    Ok(csv::Writer::from_path(path)?)
}

pub fn write_load_report(path: &Path, report: &LoadReport) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(LOAD_REPORT_HEADER)?;
    for m in &report.malformed {
        w.write_record([m.file.to_string(), m.line.to_string(), m.reason.clone()])?;
    }
    Ok(w.flush()?)
}

pub fn write_validation(path: &Path, issues: &[ValidationIssue]) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(VALIDATION_HEADER)?;
    for i in issues {
        w.write_record([
            i.severity.to_string(),
            i.code.to_string(),
            i.subject.clone(),
            i.message.clone(),
        ])?;
    }
    Ok(w.flush()?)
}

pub fn write_merges(path: &Path, report: &MergeReport) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(MERGE_HEADER)?;
    for m in &report.merged {
        w.write_record(["merged", m.survivor.as_str(), &m.absorbed.join(";")])?;
    }
    for c in &report.conflicts {
        w.write_record(["conflict", "", &c.doc_ids.join(";")])?;
    }
    Ok(w.flush()?)
}

pub fn write_links_to<W: Write>(out: W, links: &[ResolvedLink]) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LINKS_HEADER)?;
    for l in links {
        w.write_record([
            l.citing_doc_id.as_str(),
            &l.ref_index.to_string(),
            l.target_doc_id.as_deref().unwrap_or(""),
            l.target_journal_id.as_deref().unwrap_or(""),
            l.match_class.as_str(),
            &full_precision(l.score),
        ])?;
    }
    Ok(w.flush()?)
}

pub fn write_links(path: &Path, links: &[ResolvedLink]) -> Result<(), ReportError> {
    write_links_to(File::create(path)?, links)
}

fn parse_decimal(s: &str) -> Option<Rational64> {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let whole: i64 = int.parse().ok()?;
    let scale = 10i64.pow(frac.len() as u32);
    let frac_val: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    Some(Rational64::new(whole * scale + frac_val, scale))
}

/// Read a links file written by [`write_links`]. Field evidence is not part
/// of the file and comes back empty.
pub fn read_links(path: &Path) -> Result<Vec<ResolvedLink>, ReportError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    if headers.iter().ne(LINKS_HEADER) {
        return Err(ReportError::BadRow {
            path: path.display().to_string(),
            line: 1,
            reason: "unexpected header".into(),
        });
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |reason: String| ReportError::BadRow {
            path: path.display().to_string(),
            line,
            reason,
        };
        let opt = |s: &str| (!s.is_empty()).then(|| s.to_string());
        out.push(ResolvedLink {
            citing_doc_id: rec[0].to_string(),
            ref_index: rec[1].parse().map_err(|e| bad(format!("ref_index: {e}")))?,
            target_doc_id: opt(&rec[2]),
            target_journal_id: opt(&rec[3]),
            match_class: rec[4]
                .parse::<MatchClass>()
                .map_err(|e| bad(e.to_string()))?,
            score: parse_decimal(&rec[5]).ok_or_else(|| bad(format!("score {:?}", &rec[5])))?,
            field_evidence: FieldEvidence::default(),
        });
    }
    Ok(out)
}

/// One row of the index report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexRow {
    pub journal_id: String,
    pub spec: IndexVariantSpec,
    pub numerator: u64,
    pub denominator: u64,
    /// `None` for an undefined index (no documents in the cohort).
    pub value: Option<Rational64>,
    pub ci: Option<(Rational64, Rational64)>,
    pub display: String,
    pub rank: Option<usize>,
}

impl IndexRow {
    pub fn display_or_na(&self) -> &str {
        if self.value.is_some() {
            &self.display
        } else {
            UNDEFINED_DISPLAY
        }
    }
}

pub fn window_label(spec: &IndexVariantSpec) -> String {
    let w = spec.window();
    format!("{}-{}", w.start(), w.end())
}

pub fn write_index_report(path: &Path, rows: &[IndexRow]) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(INDEX_HEADER)?;
    for r in rows {
        w.write_record([
            r.journal_id.clone(),
            r.spec.numerator_mode.to_string(),
            r.spec.denominator_mode.to_string(),
            r.spec.self_cites.to_string(),
            window_label(&r.spec),
            r.numerator.to_string(),
            r.denominator.to_string(),
            r.value
                .map_or_else(|| UNDEFINED_DISPLAY.to_string(), full_precision),
            opt_rational(r.ci.map(|c| c.0)),
            opt_rational(r.ci.map(|c| c.1)),
            r.display_or_na().to_string(),
            r.rank.map(|k| k.to_string()).unwrap_or_default(),
        ])?;
    }
    Ok(w.flush()?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionRow {
    pub journal_id: String,
    pub census_year: i32,
    pub window: String,
    pub summary: DistributionSummary,
}

pub fn write_distribution(path: &Path, rows: &[DistributionRow]) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(DISTRIBUTION_HEADER)?;
    for r in rows {
        let s = &r.summary;
        let total = s.mean * Rational64::from_integer(s.n_docs as i64);
        w.write_record([
            r.journal_id.clone(),
            r.census_year.to_string(),
            r.window.clone(),
            s.n_docs.to_string(),
            full_precision(s.mean),
            full_precision(s.median),
            s.mode.to_string(),
            s.min.to_string(),
            s.max.to_string(),
            full_precision(s.share_uncited),
            total.to_integer().to_string(),
        ])?;
    }
    Ok(w.flush()?)
}

pub fn write_accrual(path: &Path, curves: &[AccrualCurve]) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(ACCRUAL_HEADER)?;
    for c in curves {
        for (offset, count) in &c.counts_by_offset {
            w.write_record([
                c.journal_id.clone(),
                c.cohort_year.to_string(),
                offset.to_string(),
                count.to_string(),
                c.peak_offset.to_string(),
            ])?;
        }
    }
    Ok(w.flush()?)
}

/// Two tab-separated columns, `offset` and `count`, one row per offset from
/// 0 to the last cited offset (zeros included) so it plots directly.
pub fn write_curve_plot<W: Write>(mut out: W, curve: &AccrualCurve) -> io::Result<()> {
    writeln!(out, "offset\tcount")?;
    let last = curve.counts_by_offset.last().map_or(0, |(o, _)| *o);
    for offset in 0..=last {
        writeln!(out, "{offset}\t{}", curve.count_at(offset))?;
    }
    Ok(())
}

pub fn write_audit(path: &Path, flags: &[AuditFlag]) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(AUDIT_HEADER)?;
    for f in flags {
        w.write_record([
            f.code.to_string(),
            f.subject.clone(),
            full_precision(f.magnitude),
            f.detail.clone(),
            f.evidence.join(";"),
        ])?;
    }
    Ok(w.flush()?)
}

pub fn write_audit_journals(path: &Path, rows: &[JournalAudit]) -> Result<(), ReportError> {
    let mut w = writer(path)?;
    w.write_record(AUDIT_JOURNAL_HEADER)?;
    for r in rows {
        w.write_record([
            r.journal_id.clone(),
            opt_rational(r.self_citation_rate),
            opt_rational(r.editorial_share),
            opt_rational(r.citing_error_rate),
        ])?;
    }
    Ok(w.flush()?)
}
