//! Flat `key=value` configuration. Keys are the long flag names; flags given
//! on the command line win over the file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use garfield_core::indices::{BootstrapConfig, NumeratorMode};
use garfield_core::pipeline::RunConfig;
use num_rational::Rational64;
use thiserror::Error;

pub const ENV_CONFIG: &str = "GARFIELD_CONFIG";

pub const KEYS: [&str; 25] = [
    "journals",
    "documents",
    "out",
    "links",
    "year",
    "window",
    "numerator",
    "denominator",
    "self-cites",
    "suspension",
    "merge-renames",
    "seed",
    "replicates",
    "level",
    "rounding",
    "strict",
    "threads",
    "edit-distance",
    "truncation",
    "count-incomplete",
    "doi-overrides",
    "self-cite-threshold",
    "editorial-threshold",
    "error-rate-threshold",
    "denylist",
];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {}: {source}", path.display())]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: expected key=value", path.display())]
    Syntax { path: PathBuf, line: usize },
    #[error("unknown setting `{0}`")]
    UnknownKey(String),
    #[error("invalid value {value:?} for `{key}`: {reason}")]
    Invalid {
        key: String,
        value: String,
        reason: String,
    },
    #[error("missing required setting `{0}`")]
    Missing(&'static str),
    #[error("`{0}` needs `seed`: the bootstrap only runs with an explicit seed")]
    BootstrapWithoutSeed(&'static str),
}

pub type Settings = BTreeMap<String, String>;

pub fn parse_config(text: &str, path: &Path) -> Result<Settings, ConfigError> {
    let mut out = Settings::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            path: path.to_path_buf(),
            line: i + 1,
        })?;
        let k = k.trim();
        if !KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey(k.to_string()));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<Settings, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

/// `0.95`, `95/100` or an integer.
pub fn parse_ratio(s: &str) -> Option<Rational64> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let (n, d): (i64, i64) = (n.trim().parse().ok()?, d.trim().parse().ok()?);
        return (d != 0).then(|| Rational64::new(n, d));
    }
    let (whole, frac) = s.split_once('.').unwrap_or((s, ""));
    if frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let negative = whole.starts_with('-');
    let whole: i64 = if whole.is_empty() || whole == "-" {
        0
    } else {
        whole.parse().ok()?
    };
    let scale = 10i64.pow(frac.len() as u32);
    let frac: i64 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    let magnitude = whole.abs() * scale + frac;
    Some(Rational64::new(
        if negative { -magnitude } else { magnitude },
        scale,
    ))
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Some(true),
        "false" | "no" | "0" | "off" => Some(false),
        _ => None,
    }
}

struct Lookup<'a>(&'a Settings);

impl Lookup<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn invalid(key: &str, value: &str, reason: impl ToString) -> ConfigError {
        ConfigError::Invalid {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        }
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: ToString,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| Self::invalid(key, v, e)))
            .transpose()
    }

    fn with<T>(
        &self,
        key: &str,
        f: fn(&str) -> Option<T>,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        self.raw(key)
            .map(|v| f(v).ok_or_else(|| Self::invalid(key, v, format!("expected {what}"))))
            .transpose()
    }
}

/// Build a run configuration from merged settings.
pub fn build_run_config(settings: &Settings) -> Result<RunConfig, ConfigError> {
    let s = Lookup(settings);
    let mut cfg = RunConfig {
        journals: s
            .raw("journals")
            .map(PathBuf::from)
            .ok_or(ConfigError::Missing("journals"))?,
        documents: s
            .raw("documents")
            .map(PathBuf::from)
            .ok_or(ConfigError::Missing("documents"))?,
        ..RunConfig::default()
    };
    if let Some(v) = s.raw("out") {
        cfg.out_dir = PathBuf::from(v);
    }
    cfg.links = s.raw("links").map(PathBuf::from);
    cfg.census_year = s.parsed("year")?;
    if let Some(v) = s.parsed("window")? {
        cfg.window_years = v;
    }
    if let Some(v) = s.raw("numerator") {
        cfg.numerators = v
            .split(',')
            .map(|m| {
                m.trim()
                    .parse::<NumeratorMode>()
                    .map_err(|e| Lookup::invalid("numerator", v, e))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = s.parsed("denominator")? {
        cfg.denominator = v;
    }
    if let Some(v) = s.parsed("self-cites")? {
        cfg.self_cites = v;
    }
    if let Some(v) = s.parsed("suspension")? {
        cfg.suspension = v;
    }
    if let Some(v) = s.with("merge-renames", parse_bool, "true or false")? {
        cfg.merge_renames = v;
    }
    if let Some(v) = s.parsed("rounding")? {
        cfg.rounding = v;
    }
    if let Some(v) = s.with("strict", parse_bool, "true or false")? {
        cfg.strict = v;
    }
    cfg.threads = s.parsed("threads")?;

    let seed: Option<u64> = s.parsed("seed")?;
    let replicates: Option<usize> = s.parsed("replicates")?;
    let level = s.with("level", parse_ratio, "a decimal or a fraction")?;
    cfg.bootstrap = match seed {
        Some(seed) => {
            let mut b = BootstrapConfig::with_seed(seed);
            if let Some(r) = replicates {
                b.replicates = r;
            }
            if let Some(l) = level {
                b.level = l;
            }
            Some(b)
        }
        None if replicates.is_some() => {
            return Err(ConfigError::BootstrapWithoutSeed("replicates"))
        }
        None if level.is_some() => return Err(ConfigError::BootstrapWithoutSeed("level")),
        None => None,
    };

    if let Some(v) = s.parsed("edit-distance")? {
        cfg.resolution.title_edit_distance_max = v;
    }
    if let Some(v) = s.parsed("truncation")? {
        cfg.resolution.truncation_length = v;
    }
    if let Some(v) = s.with("count-incomplete", parse_bool, "true or false")? {
        cfg.resolution.count_incomplete_in_g11 = v;
    }
    if let Some(v) = s.with("doi-overrides", parse_bool, "true or false")? {
        cfg.resolution.doi_overrides_fields = v;
    }
    if let Some(v) = s.with(
        "self-cite-threshold",
        parse_ratio,
        "a decimal or a fraction",
    )? {
        cfg.audit.self_citation_threshold = v;
    }
    if let Some(v) = s.with(
        "editorial-threshold",
        parse_ratio,
        "a decimal or a fraction",
    )? {
        cfg.audit.editorial_threshold = v;
    }
    if let Some(v) = s.with(
        "error-rate-threshold",
        parse_ratio,
        "a decimal or a fraction",
    )? {
        cfg.audit.citing_error_threshold = v;
    }
    if let Some(v) = s.raw("denylist") {
        cfg.audit.artifact_denylist = v
            .split(',')
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(String::from)
            .collect();
    }
    Ok(cfg)
}
