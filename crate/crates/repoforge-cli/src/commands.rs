//! Argument definitions and command implementations. Commands are pure
//! functions from arguments to rendered output plus diagnostic notes, so
//! tests can call them without spawning a process.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use repoforge_core::dsl::{evaluate, parse, EvalOutput};
use repoforge_core::ingest::{parse_commit_log, parse_issue_export, CommitFormat, IdentityRule};
use repoforge_core::linking::{Attribution, CaseStudyOptions, IssueFilter};
use repoforge_core::{Error, Relation, Result};

use crate::gitlog;
use crate::render::{self, OutputFormat};

#[derive(Debug, Parser)]
#[command(
    name = "repoforge",
    version,
    about = "Repository analytics: pipelines over commit logs and issue exports"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a pipeline file and print the result.
    Run(RunArgs),
    /// Count resolved critical issues attributable to the most frequent
    /// committer of a repository.
    CaseStudy(CaseStudyArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Pipeline file to evaluate.
    pub pipeline: PathBuf,

    /// Directory against which source paths in the pipeline resolve.
    #[arg(long, default_value = ".")]
    pub root: PathBuf,

    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    /// Git checkout directory, or a jsonl commit log file.
    #[arg(long)]
    pub repo: PathBuf,

    /// Issue export: a JSON array of issue objects.
    #[arg(long)]
    pub issues: PathBuf,

    /// Priority counted as critical (matched case-insensitively).
    #[arg(long, default_value = "Critical")]
    pub priority: String,

    /// Count resolved issues of this type instead of filtering by
    /// priority.
    #[arg(long, conflicts_with = "priority")]
    pub issue_type: Option<String>,

    /// JSON object mapping alias emails to canonical emails.
    #[arg(long)]
    pub aliases: Option<PathBuf>,

    /// How resolved issues are attributed to the developer.
    #[arg(long, value_enum, default_value_t = AttributionArg::Author)]
    pub attribution: AttributionArg,

    /// Project name for the report row; defaults to the repository name.
    #[arg(long)]
    pub project: Option<String>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttributionArg {
    /// An issue counts if one of the developer's commits links to it.
    Author,
    /// An issue counts if the developer is its assignee.
    Assignee,
}

/// Rendered standard output plus notes destined for standard error.
#[derive(Debug)]
pub struct CommandOutput {
    pub stdout: String,
    pub notes: Vec<String>,
}

pub fn execute(command: &Command) -> Result<CommandOutput> {
    match command {
        Command::Run(args) => cmd_run(args),
        Command::CaseStudy(args) => cmd_case_study(args),
    }
}

/// Exit status contract: 0 success, 1 pipeline syntax error, 2 anything
/// else (evaluation, data, IO, VCS).
pub fn exit_code_for(error: &Error) -> i32 {
    if error.is_syntax() {
        1
    } else {
        2
    }
}

pub fn cmd_run(args: &RunArgs) -> Result<CommandOutput> {
    let text = fs::read_to_string(&args.pipeline)?;
    let ast = parse(&text)?;
    let output = evaluate(&ast, &args.root)?;
    Ok(CommandOutput {
        stdout: render::render_output(&output, args.format)?,
        notes: Vec::new(),
    })
}

pub fn cmd_case_study(args: &CaseStudyArgs) -> Result<CommandOutput> {
    let commits = load_commits(&args.repo)?;
    let issues = parse_issue_export(&fs::read(&args.issues)?)?;

    let mut options = CaseStudyOptions::new(project_name(args));
    if let Some(path) = &args.aliases {
        options.identity = IdentityRule::from_json(&fs::read(path)?)?;
    }
    let note = match &args.issue_type {
        Some(kind) => {
            options.filter = IssueFilter::Type(kind.clone());
            format!("counting resolved issues of type {kind:?}")
        }
        None => {
            options.filter = IssueFilter::Priority(Some(args.priority.clone()));
            format!("counting resolved issues with priority {:?}", args.priority)
        }
    };
    options.attribution = match args.attribution {
        AttributionArg::Author => Attribution::Author,
        AttributionArg::Assignee => Attribution::Assignee,
    };

    let report = repoforge_core::linking::run_case_study(&commits, &issues, &options)?;
    Ok(CommandOutput {
        stdout: render::render_output(&EvalOutput::Report(report), args.format)?,
        notes: vec![note],
    })
}

/// A directory is treated as a checkout and read through the VCS; a file
/// is read as a jsonl commit log.
fn load_commits(repo: &Path) -> Result<Relation> {
    if repo.is_dir() {
        let bytes = gitlog::git_log_records(repo)?;
        parse_commit_log(&bytes, CommitFormat::GitRecords)
    } else {
        parse_commit_log(&fs::read(repo)?, CommitFormat::Jsonl)
    }
}

fn project_name(args: &CaseStudyArgs) -> String {
    if let Some(name) = &args.project {
        return name.clone();
    }
    let resolved = args.repo.canonicalize().unwrap_or_else(|_| args.repo.clone());
    resolved
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "project".to_string())
}
