//! Pipeline evaluation: a left fold of stages over the relation loaded from
//! the source, with stage-indexed error reporting.

use std::path::Path;

use crate::algebra::{self, Aggregate, JoinKind};
use crate::dsl::ast::{PipelineAst, Source, SourceFormat, Stage};
use crate::error::{Error, Result};
use crate::ingest::{self, CommitFormat, IdentityRule};
use crate::linking::{self, CaseStudyReport, LinkRule};
use crate::mining::{self, RankedEntry};
use crate::relation::{Column, Relation};

/// What a pipeline evaluates to: a relation, or one of the scalar shapes
/// produced by terminal stages.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalOutput {
    Relation(Relation),
    /// Result of `count`.
    Count(i64),
    /// Result of `find_max`/`find_min`: the ranked key column (name and
    /// type preserved from the input) and the winning entry, if any.
    Ranked {
        key: Column,
        entry: Option<RankedEntry>,
    },
    /// Result of `case_study`.
    Report(CaseStudyReport),
}

/// Evaluates a parsed pipeline. File paths in sources resolve relative to
/// `root`. Stage failures are tagged with the 1-based stage index and stage
/// name; source-loading failures surface untagged.
pub fn evaluate(ast: &PipelineAst, root: &Path) -> Result<EvalOutput> {
    let mut flow = load_source(&ast.source, root)?;
    let mut output: Option<EvalOutput> = None;
    for (i, stage) in ast.stages.iter().enumerate() {
        let index = i + 1;
        if output.is_some() {
            return Err(Error::Eval(
                "pipeline continues after a scalar-producing stage".to_string(),
            )
            .at_stage(index, stage.name()));
        }
        let tag = |e: Error| e.at_stage(index, stage.name());
        match stage {
            Stage::Filter(predicate) => {
                flow = algebra::filter(&flow, predicate).map_err(tag)?;
            }
            Stage::Project(columns) => {
                let names: Vec<&str> = columns.iter().map(String::as_str).collect();
                flow = algebra::project(&flow, &names).map_err(tag)?;
            }
            Stage::Join { source, on } => {
                let right = load_source(source, root).map_err(tag)?;
                flow = algebra::join(&flow, &right, &[(on, on)], JoinKind::Inner)
                    .map_err(tag)?;
            }
            Stage::Sort(keys) => {
                flow = algebra::sort(&flow, keys).map_err(tag)?;
            }
            Stage::Count => {
                output = Some(EvalOutput::Count(algebra::count(&flow)));
            }
            Stage::Union(source) => {
                let other = load_source(source, root).map_err(tag)?;
                flow = algebra::union(&flow, &other).map_err(tag)?;
            }
            Stage::Distinct => {
                flow = algebra::distinct(&flow);
            }
            Stage::GroupCount(keys) => {
                let names: Vec<&str> = keys.iter().map(String::as_str).collect();
                flow = algebra::group_aggregate(&flow, &names, &[Aggregate::count("count")])
                    .map_err(tag)?;
            }
            Stage::FrequencyRank(key) => {
                flow = mining::frequency_rank(&flow, key).map_err(tag)?;
            }
            Stage::FindMax(key) | Stage::FindMin(key) => {
                let index_of_key = flow.schema().require(key).map_err(tag)?;
                let column = flow.schema().columns()[index_of_key].clone();
                let entry = match stage {
                    Stage::FindMax(_) => mining::find_max(&flow, key),
                    _ => mining::find_min(&flow, key),
                }
                .map_err(tag)?;
                output = Some(EvalOutput::Ranked { key: column, entry });
            }
            Stage::TopK { key, k } => {
                flow = mining::top_k(&flow, key, *k).map_err(tag)?;
            }
            Stage::TimeWindow { column, from, to } => {
                flow = mining::time_window(&flow, column, *from, *to).map_err(tag)?;
            }
            Stage::NormalizeIdentity => {
                flow = ingest::normalize_identity(&flow, &IdentityRule::default())
                    .map_err(tag)?;
            }
            Stage::LinkIssues { source, pattern } => {
                let issues = load_source(source, root).map_err(tag)?;
                let rule = match pattern {
                    Some(pattern) => LinkRule::new(pattern).map_err(tag)?,
                    None => LinkRule::default(),
                };
                flow = linking::link_issues(&flow, &issues, &rule).map_err(tag)?;
            }
            Stage::ResolvedFilter { priority } => {
                flow = linking::resolved_issue_filter(&flow, priority.as_deref(), true)
                    .map_err(tag)?;
            }
            Stage::CaseStudy { source, priority } => {
                let issues = load_source(source, root).map_err(tag)?;
                let report = linking::critical_issues_by_frequent_committer(
                    &flow,
                    &issues,
                    &LinkRule::default(),
                    priority.as_deref().unwrap_or("Critical"),
                )
                .map_err(tag)?;
                output = Some(EvalOutput::Report(report));
            }
        }
    }
    Ok(output.unwrap_or(EvalOutput::Relation(flow)))
}

fn load_source(source: &Source, root: &Path) -> Result<Relation> {
    match source {
        Source::Commits { path, format } => {
            let bytes = std::fs::read(root.join(path))?;
            let format = match format.unwrap_or(SourceFormat::Jsonl) {
                SourceFormat::Jsonl => CommitFormat::Jsonl,
                SourceFormat::GitRecords => CommitFormat::GitRecords,
            };
            ingest::parse_commit_log(&bytes, format)
        }
        Source::Issues { path } => {
            let bytes = std::fs::read(root.join(path))?;
            ingest::parse_issue_export(&bytes)
        }
    }
}
