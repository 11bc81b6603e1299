mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use garfield_core::pipeline::{run, Stage};

use config::{build_run_config, read_config, Settings, ENV_CONFIG};

#[derive(Parser)]
#[command(
    name = "garfield",
    version,
    about = "Citation indices with an auditable trail"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check the corpus; write load_report, validation and merges.
    Validate(Args),
    /// Match every reference; write links.csv.
    Resolve(Args),
    /// Compute index variants; write indices.csv.
    Compute(Args),
    /// Citation distributions and accrual curves.
    Stats(Args),
    /// Self-citation, editorial, error-rate and temporal checks.
    Audit(Args),
    /// Every stage, every output.
    Report(Args),
}

/// Every value flag is optional here; defaults live in the run configuration
/// so that a config file can supply them too.
#[derive(clap::Args)]
struct Args {
    /// Flat key=value file; also read from GARFIELD_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    journals: Option<String>,
    #[arg(long)]
    documents: Option<String>,
    #[arg(long)]
    out: Option<String>,
    /// Links file from an earlier `resolve` run.
    #[arg(long)]
    links: Option<String>,
    /// Census year; defaults to the latest publication year.
    #[arg(long)]
    year: Option<String>,
    #[arg(long)]
    window: Option<String>,
    /// Comma list of mm, am, oneone.
    #[arg(long)]
    numerator: Option<String>,
    /// citable or all.
    #[arg(long)]
    denominator: Option<String>,
    /// include or exclude.
    #[arg(long = "self-cites")]
    self_cites: Option<String>,
    /// omit-cites, include-docs or ignore.
    #[arg(long)]
    suspension: Option<String>,
    #[arg(long = "merge-renames")]
    merge_renames: Option<String>,
    /// Enables the bootstrap interval.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    replicates: Option<String>,
    #[arg(long)]
    level: Option<String>,
    /// 3dp, 1dp or error-aware.
    #[arg(long)]
    rounding: Option<String>,
    /// Exit 3 when a threshold audit flag fires.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long = "edit-distance")]
    edit_distance: Option<String>,
    #[arg(long)]
    truncation: Option<String>,
    #[arg(long = "count-incomplete")]
    count_incomplete: Option<String>,
    #[arg(long = "doi-overrides")]
    doi_overrides: Option<String>,
    #[arg(long = "self-cite-threshold")]
    self_cite_threshold: Option<String>,
    #[arg(long = "editorial-threshold")]
    editorial_threshold: Option<String>,
    #[arg(long = "error-rate-threshold")]
    error_rate_threshold: Option<String>,
    /// Comma list of cited-work names marking test records.
    #[arg(long)]
    denylist: Option<String>,
}

impl Args {
    fn flags(&self) -> Settings {
        let pairs = [
            ("journals", &self.journals),
            ("documents", &self.documents),
            ("out", &self.out),
            ("links", &self.links),
            ("year", &self.year),
            ("window", &self.window),
            ("numerator", &self.numerator),
            ("denominator", &self.denominator),
            ("self-cites", &self.self_cites),
            ("suspension", &self.suspension),
            ("merge-renames", &self.merge_renames),
            ("seed", &self.seed),
            ("replicates", &self.replicates),
            ("level", &self.level),
            ("rounding", &self.rounding),
            ("threads", &self.threads),
            ("edit-distance", &self.edit_distance),
            ("truncation", &self.truncation),
            ("count-incomplete", &self.count_incomplete),
            ("doi-overrides", &self.doi_overrides),
            ("self-cite-threshold", &self.self_cite_threshold),
            ("editorial-threshold", &self.editorial_threshold),
            ("error-rate-threshold", &self.error_rate_threshold),
            ("denylist", &self.denylist),
        ];
        let mut out: Settings = pairs
            .into_iter()
            .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
            .collect();
        if self.strict {
            out.insert("strict".into(), "true".into());
        }
        out
    }
}

fn execute(stage: Stage, args: &Args) -> Result<i32, (i32, String)> {
    let config_path = args
        .config
        .clone()
        .or_else(|| std::env::var_os(ENV_CONFIG).map(PathBuf::from));
    let mut settings = match config_path {
        Some(p) => read_config(&p).map_err(|e| (1, e.to_string()))?,
        None => Settings::new(),
    };
    settings.extend(args.flags());
    let cfg = build_run_config(&settings).map_err(|e| (1, e.to_string()))?;
    let outcome = run(&cfg, stage).map_err(|e| (e.exit_code(), e.to_string()))?;
    print!("{}", outcome.summary);
    if outcome.exit_code == 3 {
        eprintln!("garfield: audit threshold exceeded (strict mode)");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (stage, args) = match &cli.command {
        Command::Validate(a) => (Stage::Validate, a),
        Command::Resolve(a) => (Stage::Resolve, a),
        Command::Compute(a) => (Stage::Compute, a),
        Command::Stats(a) => (Stage::Stats, a),
        Command::Audit(a) => (Stage::Audit, a),
        Command::Report(a) => (Stage::Report, a),
    };
    match execute(stage, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err((code, msg)) => {
            eprintln!("garfield: error: {msg}");
            ExitCode::from(code as u8)
        }
    }
}
