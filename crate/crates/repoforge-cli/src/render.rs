//! Deterministic rendering of relations, scalars, and reports.
//!
//! The same relation always renders to the same bytes in every format:
//! no locale, no terminal probing, no hash-order iteration. Timestamps
//! print as ISO-8601 UTC with a `Z` suffix and microsecond precision.

use clap::ValueEnum;

use repoforge_core::dsl::EvalOutput;
use repoforge_core::linking::CaseStudyReport;
use repoforge_core::relation::{BaseType, ColumnType};
use repoforge_core::{Column, Record, Relation, Result, Schema, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Aligned columns for humans.
    Table,
    /// RFC 4180 quoting, one header line, `\n` line endings.
    Csv,
    /// A JSON array of objects; keys keep column order.
    Json,
}

/// Renders any evaluation output by first shaping scalars and reports into
/// single-row relations.
pub fn render_output(output: &EvalOutput, format: OutputFormat) -> Result<String> {
    let rel = output_relation(output)?;
    Ok(render_relation(&rel, format))
}

/// The relation form of an evaluation output: relations pass through,
/// `count` becomes a one-column row, a ranked winner becomes a
/// `{key, count}` row (or no rows), and a report becomes its table row.
pub fn output_relation(output: &EvalOutput) -> Result<Relation> {
    match output {
        EvalOutput::Relation(rel) => Ok(rel.clone()),
        EvalOutput::Count(n) => {
            let schema = Schema::new(vec![("count", ColumnType::required(BaseType::Int))])?;
            Relation::new(schema, vec![Record::new(vec![Value::Int(*n)])])
        }
        EvalOutput::Ranked { key, entry } => {
            let schema = Schema::new(vec![
                key.clone(),
                Column::from(("count", ColumnType::required(BaseType::Int))),
            ])?;
            let rows = entry
                .iter()
                .map(|e| Record::new(vec![e.key.clone(), Value::Int(e.count)]))
                .collect();
            Relation::new(schema, rows)
        }
        EvalOutput::Report(report) => report_relation(report),
    }
}

/// The four-column report row: project, total commits, the most frequent
/// developer's display name, and the resolved-issue count attributed to
/// them.
pub fn report_relation(report: &CaseStudyReport) -> Result<Relation> {
    let schema = Schema::new(vec![
        ("project", ColumnType::required(BaseType::Text)),
        ("commits", ColumnType::required(BaseType::Int)),
        ("frequent_developer", ColumnType::nullable(BaseType::Text)),
        ("resolved_critical", ColumnType::required(BaseType::Int)),
    ])?;
    let developer = report
        .frequent_committer
        .as_ref()
        .map(|id| Value::text(id.name.clone()))
        .unwrap_or(Value::Null);
    let row = Record::new(vec![
        Value::text(report.project.clone()),
        Value::Int(report.total_commits),
        developer,
        Value::Int(report.critical_issues_resolved),
    ]);
    Relation::new(schema, vec![row])
}

pub fn render_relation(rel: &Relation, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => render_table(rel),
        OutputFormat::Csv => render_csv(rel),
        OutputFormat::Json => render_json(rel),
    }
}

/// Cell text shared by the table and csv renderers. Null is the empty
/// string; csv quoting is applied separately.
fn cell_text(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Int(n) => n.to_string(),
        Value::Float(f) => f.to_string(),
        Value::Text(s) => s.clone(),
        Value::Timestamp(ts) => ts.to_string(),
    }
}

fn render_table(rel: &Relation) -> String {
    let headers: Vec<&str> = rel.schema().columns().iter().map(|c| c.name.as_str()).collect();
    let rows: Vec<Vec<String>> = rel
        .rows()
        .iter()
        .map(|r| r.values.iter().map(cell_text).collect())
        .collect();

    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }

    let mut out = String::new();
    let mut push_line = |cells: &[String]| {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            let pad = widths[i].saturating_sub(cell.chars().count());
            line.extend(std::iter::repeat_n(' ', pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    };

    push_line(&headers.iter().map(|h| h.to_string()).collect::<Vec<_>>());
    push_line(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>());
    for row in &rows {
        push_line(row);
    }
    out
}

fn csv_field(text: &str) -> String {
    if text.contains(['"', ',', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn render_csv(rel: &Relation) -> String {
    let mut out = String::new();
    let header: Vec<String> = rel
        .schema()
        .columns()
        .iter()
        .map(|c| csv_field(&c.name))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rel.rows() {
        let cells: Vec<String> = row.values.iter().map(|v| csv_field(&cell_text(v))).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn json_cell(value: &Value) -> serde_json::Value {
    match value {
        Value::Null => serde_json::Value::Null,
        Value::Bool(b) => serde_json::Value::Bool(*b),
        Value::Int(n) => serde_json::Value::from(*n),
        // Relations never hold NaN; a non-finite float (which JSON cannot
        // carry as a number) falls back to its text form.
        Value::Float(f) => serde_json::Number::from_f64(*f)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(f.to_string())),
        Value::Text(s) => serde_json::Value::String(s.clone()),
        Value::Timestamp(ts) => serde_json::Value::String(ts.to_string()),
    }
}

fn render_json(rel: &Relation) -> String {
    let names: Vec<&str> = rel.schema().columns().iter().map(|c| c.name.as_str()).collect();
    let objects: Vec<serde_json::Value> = rel
        .rows()
        .iter()
        .map(|row| {
            let mut object = serde_json::Map::new();
            for (name, value) in names.iter().zip(&row.values) {
                object.insert((*name).to_string(), json_cell(value));
            }
            serde_json::Value::Object(object)
        })
        .collect();
    let mut out = serde_json::to_string(&serde_json::Value::Array(objects))
        .expect("json rendering cannot fail");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Relation {
        let schema = Schema::new(vec![
            ("name", ColumnType::required(BaseType::Text)),
            ("n", ColumnType::required(BaseType::Int)),
            ("note", ColumnType::nullable(BaseType::Text)),
        ])
        .unwrap();
        Relation::new(
            schema,
            vec![
                Record::new(vec![Value::text("plain"), Value::Int(1), Value::Null]),
                Record::new(vec![
                    Value::text("a,b \"q\""),
                    Value::Int(-2),
                    Value::text("x"),
                ]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn table_aligns_and_trims() {
        let out = render_table(&sample());
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "name     n   note");
        assert_eq!(lines[1], "-------  --  ----");
        assert_eq!(lines[2], "plain    1");
        assert!(!out.contains(" \n"), "no trailing spaces");
        assert!(out.ends_with('\n'));
    }

    #[test]
    fn csv_quotes_per_rfc_4180() {
        let out = render_csv(&sample());
        assert_eq!(
            out,
            "name,n,note\nplain,1,\n\"a,b \"\"q\"\"\",-2,x\n"
        );
    }

    #[test]
    fn csv_of_empty_relation_is_header_only() {
        let schema = Schema::new(vec![("a", ColumnType::required(BaseType::Int))]).unwrap();
        let rel = Relation::new(schema, vec![]).unwrap();
        assert_eq!(render_csv(&rel), "a\n");
    }

    #[test]
    fn json_is_an_ordered_array_of_objects() {
        let out = render_json(&sample());
        assert_eq!(
            out,
            "[{\"name\":\"plain\",\"n\":1,\"note\":null},{\"name\":\"a,b \\\"q\\\"\",\"n\":-2,\"note\":\"x\"}]\n"
        );
    }

    #[test]
    fn count_output_renders_as_single_row() {
        let out = render_output(&EvalOutput::Count(20), OutputFormat::Json).unwrap();
        assert_eq!(out, "[{\"count\":20}]\n");
    }
}
