//! apkdeps: reconstructs the third-party libraries packaged into an Android
//! APK by reading the project's Gradle build sources — no build execution,
//! no dependency downloads.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use apkdeps_core::keywords::KeywordTable;
use apkdeps_core::metrics::{self, EvaluationPair};
use apkdeps_core::model::ModuleId;
use apkdeps_core::{extract_project, ExtractOptions, ExtractionReport};

#[derive(Parser, Debug)]
#[command(
    name = "apkdeps",
    about = "Static extraction of packaged dependency coordinates from Gradle build sources.",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract the packaged dependency set of a single project.
    Extract(ExtractArgs),
    /// Extract every project under a directory and write a report corpus.
    Corpus(CorpusArgs),
    /// Score extracted label sets against golden dependency lists.
    Metrics(MetricsArgs),
}

/// Flags shared by every command that runs an extraction.
#[derive(Args, Debug, Clone)]
struct SharedFlags {
    /// Build variant to select (repeatable). Defaults to every declared
    /// flavor plus `release`.
    #[arg(long = "variant", value_name = "NAME")]
    variant: Vec<String>,
    /// Module to treat as the shipped application (e.g. `:app`), overriding
    /// plugin-based detection.
    #[arg(long, value_name = "MODULE")]
    main_module: Option<String>,
    /// Keyword classification overrides, one `keyword<TAB>CLASS[<TAB>prefix]`
    /// per line.
    #[arg(long, value_name = "PATH")]
    keyword_table: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Project directory (the Gradle root or any directory inside it).
    project: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    #[command(flatten)]
    flags: SharedFlags,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OutputFormat {
    Json,
    Lines,
}

#[derive(Args, Debug)]
struct CorpusArgs {
    /// Directory whose immediate subdirectories are the projects to extract.
    dir: PathBuf,
    /// Directory for per-project reports and the corpus summary.
    #[arg(long, value_name = "DIR", default_value = "apkdeps-reports")]
    output: PathBuf,
    /// Worker threads (default: one per CPU).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    #[command(flatten)]
    flags: SharedFlags,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// Directory whose immediate subdirectories are the projects to extract.
    projects: PathBuf,
    /// Directory of golden label lists, one `<project>.txt` per project.
    #[arg(long, value_name = "DIR")]
    golden: PathBuf,
    /// Write the score report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Worker threads (default: one per CPU).
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    #[command(flatten)]
    flags: SharedFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Extract(args) => run_extract(args),
        Command::Corpus(args) => run_corpus(args),
        Command::Metrics(args) => run_metrics(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn build_options(flags: &SharedFlags) -> Result<ExtractOptions> {
    let keyword_table = match &flags.keyword_table {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("failed to read {}", path.display()))?;
            KeywordTable::with_overrides(&text)
                .with_context(|| format!("invalid keyword table {}", path.display()))?
        }
        None => KeywordTable::default(),
    };
    let variants: BTreeSet<String> = flags.variant.iter().cloned().collect();
    Ok(ExtractOptions {
        variants: if variants.is_empty() { None } else { Some(variants) },
        main_module: flags.main_module.as_deref().map(ModuleId::new),
        keyword_table,
        ..ExtractOptions::default()
    })
}

// ─── extract ────────────────────────────────────────────────────────────────

fn run_extract(args: ExtractArgs) -> Result<ExitCode> {
    let options = build_options(&args.flags)?;
    let report = match extract_project(&args.project, &options) {
        Ok(report) => report,
        Err(err) => {
            eprintln!("error[{}]: {err}", err.code());
            return Ok(ExitCode::from(err.exit_code() as u8));
        }
    };

    let rendered = match args.format {
        OutputFormat::Json => {
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            text
        }
        OutputFormat::Lines => report.lines(),
    };
    match &args.output {
        Some(path) if path != Path::new("-") => fs::write(path, rendered)
            .with_context(|| format!("failed to write {}", path.display()))?,
        _ => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}

// ─── corpus ─────────────────────────────────────────────────────────────────

/// One project's extraction result inside a corpus run.
struct ProjectOutcome {
    name: String,
    result: Result<ExtractionReport, (String, String)>,
}

#[derive(Serialize)]
struct CorpusSummary {
    projects: usize,
    succeeded: usize,
    failed: Vec<FailedProject>,
    total_dependencies: usize,
    avg_dependencies: f64,
    /// Local binary artifacts seen across the corpus, by kind.
    local_artifacts: BTreeMap<String, usize>,
    referenced_local_artifacts: usize,
    reports: Vec<String>,
}

#[derive(Serialize)]
struct FailedProject {
    project: String,
    code: String,
    message: String,
}

fn run_corpus(args: CorpusArgs) -> Result<ExitCode> {
    let options = build_options(&args.flags)?;
    let projects = project_dirs(&args.dir)?;
    if projects.is_empty() {
        bail!("no project directories under {}", args.dir.display());
    }

    let outcomes = extract_all(&projects, &options, args.jobs)?;

    fs::create_dir_all(&args.output)
        .with_context(|| format!("failed to create {}", args.output.display()))?;

    let mut summary = CorpusSummary {
        projects: outcomes.len(),
        succeeded: 0,
        failed: Vec::new(),
        total_dependencies: 0,
        avg_dependencies: 0.0,
        local_artifacts: BTreeMap::new(),
        referenced_local_artifacts: 0,
        reports: Vec::new(),
    };
    for outcome in &outcomes {
        match &outcome.result {
            Ok(report) => {
                summary.succeeded += 1;
                summary.total_dependencies += report.dependencies.len();
                for artifact in &report.local_artifacts {
                    let kind = serde_json::to_value(artifact.kind)?
                        .as_str()
                        .unwrap_or("UNKNOWN")
                        .to_string();
                    *summary.local_artifacts.entry(kind).or_insert(0) += 1;
                    if artifact.referenced {
                        summary.referenced_local_artifacts += 1;
                    }
                }
                let file_name = format!("{}.report.json", outcome.name);
                let mut text = serde_json::to_string_pretty(report)?;
                text.push('\n');
                let path = args.output.join(&file_name);
                fs::write(&path, text)
                    .with_context(|| format!("failed to write {}", path.display()))?;
                summary.reports.push(file_name);
            }
            Err((code, message)) => summary.failed.push(FailedProject {
                project: outcome.name.clone(),
                code: code.clone(),
                message: message.clone(),
            }),
        }
    }
    if summary.succeeded > 0 {
        summary.avg_dependencies = summary.total_dependencies as f64 / summary.succeeded as f64;
    }

    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    let summary_path = args.output.join("summary.json");
    fs::write(&summary_path, text)
        .with_context(|| format!("failed to write {}", summary_path.display()))?;

    println!(
        "extracted {}/{} projects, reports in {}",
        summary.succeeded,
        summary.projects,
        args.output.display()
    );
    Ok(ExitCode::SUCCESS)
}

// ─── metrics ────────────────────────────────────────────────────────────────

#[derive(Serialize)]
struct ScoreReport {
    n: usize,
    pearson: Option<f64>,
    mae: f64,
    match_rate: f64,
    projects: Vec<ProjectScore>,
}

#[derive(Serialize)]
struct ProjectScore {
    project: String,
    predicted: usize,
    golden: usize,
    exact: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    missing: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    extra: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn run_metrics(args: MetricsArgs) -> Result<ExitCode> {
    let options = build_options(&args.flags)?;
    let mut projects = project_dirs(&args.projects)?;
    projects.retain(|(name, _)| {
        let has_golden = args.golden.join(format!("{name}.txt")).is_file();
        if !has_golden {
            eprintln!("warning: no golden list for {name}, skipping");
        }
        has_golden
    });
    if projects.len() < 2 {
        bail!("need at least two projects with golden lists to score");
    }

    let outcomes = extract_all(&projects, &options, args.jobs)?;

    let mut pairs = Vec::new();
    let mut scores = Vec::new();
    for outcome in &outcomes {
        let golden_path = args.golden.join(format!("{}.txt", outcome.name));
        let golden_text = fs::read_to_string(&golden_path)
            .with_context(|| format!("failed to read {}", golden_path.display()))?;
        let golden = metrics::parse_golden(&golden_text);

        // A failed extraction scores as an empty prediction: the corpus
        // numbers must not hide crashes-to-zero behind a skipped row.
        let (predicted, error) = match &outcome.result {
            Ok(report) => (report.label_set(), None),
            Err((code, message)) => (BTreeSet::new(), Some(format!("[{code}] {message}"))),
        };
        scores.push(ProjectScore {
            project: outcome.name.clone(),
            predicted: predicted.len(),
            golden: golden.len(),
            exact: predicted == golden,
            missing: golden.difference(&predicted).cloned().collect(),
            extra: predicted.difference(&golden).cloned().collect(),
            error,
        });
        pairs.push(EvaluationPair {
            project_id: outcome.name.clone(),
            predicted,
            golden,
        });
    }

    let summary = metrics::evaluate(&pairs)?;
    let report = ScoreReport {
        n: summary.n,
        pearson: summary.pearson,
        mae: summary.mae,
        match_rate: summary.match_rate,
        projects: scores,
    };
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    match &args.output {
        Some(path) => fs::write(path, text)
            .with_context(|| format!("failed to write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

// ─── shared plumbing ────────────────────────────────────────────────────────

/// Immediate subdirectories of `dir`, sorted by name.
fn project_dirs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let entries = fs::read_dir(dir)
        .with_context(|| format!("failed to read directory {}", dir.display()))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() {
            let name = path
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            out.push((name, path));
        }
    }
    out.sort();
    Ok(out)
}

/// Extracts every project, in parallel, preserving input order.
fn extract_all(
    projects: &[(String, PathBuf)],
    options: &ExtractOptions,
    jobs: Option<usize>,
) -> Result<Vec<ProjectOutcome>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().context("failed to build worker pool")?;
    Ok(pool.install(|| {
        projects
            .par_iter()
            .map(|(name, path)| ProjectOutcome {
                name: name.clone(),
                result: extract_project(path, options)
                    .map_err(|e| (e.code().to_string(), e.to_string())),
            })
            .collect()
    }))
}
