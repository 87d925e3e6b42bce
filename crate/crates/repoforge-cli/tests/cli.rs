//! End-to-end tests against the compiled binary: exit codes, output
//! formats, golden bytes, the case-study command over both repository
//! encodings (jsonl log and a real git checkout), and agreement between
//! the binary and direct library evaluation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::SeedableRng;
use tempfile::TempDir;

use repoforge_cli::render::{render_output, OutputFormat};
use repoforge_core::dsl::{evaluate, parse, EvalOutput};
use repoforge_core::ingest::{parse_commit_log, parse_issue_export, CommitFormat, IdentityRule};
use repoforge_core::linking::{run_case_study, Attribution, CaseStudyOptions, IssueFilter};
use repoforge_core::Value;
use repoforge_testkit::{corpus, fixture};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repoforge"))
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run_pipeline(pipeline: &str, format: &str) -> Output {
    bin()
        .arg("run")
        .arg(fixtures_dir().join("pipelines").join(pipeline))
        .arg("--root")
        .arg(fixtures_dir())
        .arg("--format")
        .arg(format)
        .output()
        .expect("spawn repoforge")
}

fn stdout_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stdout).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> &str {
    std::str::from_utf8(&output.stderr).expect("utf-8 stderr")
}

#[test]
fn run_prints_count_table_and_exits_zero() {
    let output = run_pipeline("commit_count.pipe", "table");
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert_eq!(stdout_of(&output), "count\n-----\n20\n");
}

#[test]
fn run_matches_golden_bytes_in_every_format() {
    let cases = [
        ("committer_rank.pipe", "table", "golden/committer_rank.table"),
        ("committer_rank.pipe", "csv", "golden/committer_rank.csv"),
        ("committer_rank.pipe", "json", "golden/committer_rank.json"),
        ("case_study.pipe", "table", "golden/case_study.table"),
    ];
    for (pipeline, format, golden) in cases {
        let output = run_pipeline(pipeline, format);
        assert!(output.status.success(), "{pipeline}: {}", stderr_of(&output));
        let expected = fs::read(fixtures_dir().join(golden)).expect(golden);
        assert_eq!(
            output.stdout, expected,
            "{pipeline} as {format} drifted from {golden}"
        );
    }
}

#[test]
fn binary_agrees_with_library_evaluation_on_every_pipeline() {
    let root = fixtures_dir();
    let mut pipelines: Vec<_> = fs::read_dir(root.join("pipelines"))
        .unwrap()
        .map(|entry| entry.unwrap().path())
        .collect();
    pipelines.sort();
    assert!(pipelines.len() >= 13, "pipeline corpus went missing");

    for path in pipelines {
        let text = fs::read_to_string(&path).unwrap();
        let ast = parse(&text).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        let direct = evaluate(&ast, &root).unwrap_or_else(|e| panic!("{path:?}: {e}"));
        for (name, format) in [
            ("table", OutputFormat::Table),
            ("csv", OutputFormat::Csv),
            ("json", OutputFormat::Json),
        ] {
            let expected = render_output(&direct, format).unwrap();
            let output = bin()
                .arg("run")
                .arg(&path)
                .arg("--root")
                .arg(&root)
                .arg("--format")
                .arg(name)
                .output()
                .unwrap();
            assert!(output.status.success(), "{path:?}: {}", stderr_of(&output));
            assert_eq!(stdout_of(&output), expected, "{path:?} as {name}");
        }
    }
}

#[test]
fn syntax_errors_exit_one_and_name_the_position() {
    let dir = TempDir::new().unwrap();
    // (source text, fragment the stderr diagnostic must contain)
    let cases = [
        (r#"commits("unterminated"#, "lex error at 1:9"),
        (r#"commits("c.jsonl") |"#, "parse error at 1:21"),
        (r#"commits("c.jsonl") | sort(x up)"#, "parse error at 1:29"),
    ];
    for (text, fragment) in cases {
        let path = dir.path().join("bad.pipe");
        fs::write(&path, text).unwrap();
        let output = bin().arg("run").arg(&path).output().unwrap();
        assert_eq!(output.status.code(), Some(1), "for {text:?}");
        let stderr = stderr_of(&output);
        assert!(
            stderr.contains(fragment),
            "stderr for {text:?} was {stderr:?}, wanted {fragment:?}"
        );
    }
}

#[test]
fn missing_data_file_exits_two() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("orphan.pipe");
    fs::write(&path, r#"commits("no-such-file.jsonl") | count"#).unwrap();
    let output = bin()
        .arg("run")
        .arg(&path)
        .arg("--root")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).starts_with("error:"));
}

#[test]
fn missing_pipeline_file_exits_two() {
    let output = bin().arg("run").arg("/no/such/pipeline.pipe").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).starts_with("error:"));
}

#[test]
fn case_study_over_jsonl_matches_golden_and_reports_filter() {
    let root = fixtures_dir();
    let output = bin()
        .arg("case-study")
        .arg("--repo")
        .arg(root.join("commits.jsonl"))
        .arg("--issues")
        .arg(root.join("issues.json"))
        .arg("--aliases")
        .arg(root.join("aliases.json"))
        .arg("--project")
        .arg("forge")
        .arg("--format")
        .arg("csv")
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let expected = fs::read(root.join("golden/case_study_command.csv")).unwrap();
    assert_eq!(output.stdout, expected);
    assert!(
        stderr_of(&output).contains("note: counting resolved issues with priority \"Critical\""),
        "stderr: {}",
        stderr_of(&output)
    );
}

/// The issue population can be selected by type instead of priority; the
/// command reports which filter ran and matches the library result.
#[test]
fn issue_type_filter_is_reported_and_matches_the_library() {
    let root = fixtures_dir();
    let output = bin()
        .arg("case-study")
        .arg("--repo")
        .arg(root.join("commits.jsonl"))
        .arg("--issues")
        .arg(root.join("issues.json"))
        .arg("--project")
        .arg("forge")
        .arg("--issue-type")
        .arg("Bug")
        .arg("--format")
        .arg("csv")
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert!(
        stderr_of(&output).contains("note: counting resolved issues of type \"Bug\""),
        "stderr: {}",
        stderr_of(&output)
    );

    let commits = parse_commit_log(
        &fs::read(root.join("commits.jsonl")).unwrap(),
        CommitFormat::Jsonl,
    )
    .unwrap();
    let issues = parse_issue_export(&fs::read(root.join("issues.json")).unwrap()).unwrap();
    let mut options = CaseStudyOptions::new("forge");
    options.filter = IssueFilter::Type("Bug".to_string());
    let report = run_case_study(&commits, &issues, &options).unwrap();
    let expected = render_output(&EvalOutput::Report(report), OutputFormat::Csv).unwrap();
    assert_eq!(stdout_of(&output), expected);
}

#[test]
fn issue_type_conflicts_with_explicit_priority() {
    let output = bin()
        .arg("case-study")
        .arg("--repo")
        .arg("x.jsonl")
        .arg("--issues")
        .arg("i.json")
        .arg("--priority")
        .arg("Major")
        .arg("--issue-type")
        .arg("Bug")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("cannot be used with"));
}

#[test]
fn assignee_attribution_matches_the_library() {
    let root = fixtures_dir();
    let output = bin()
        .arg("case-study")
        .arg("--repo")
        .arg(root.join("commits.jsonl"))
        .arg("--issues")
        .arg(root.join("issues.json"))
        .arg("--aliases")
        .arg(root.join("aliases.json"))
        .arg("--project")
        .arg("forge")
        .arg("--attribution")
        .arg("assignee")
        .arg("--format")
        .arg("json")
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));

    let commits = parse_commit_log(
        &fs::read(root.join("commits.jsonl")).unwrap(),
        CommitFormat::Jsonl,
    )
    .unwrap();
    let issues = parse_issue_export(&fs::read(root.join("issues.json")).unwrap()).unwrap();
    let mut options = CaseStudyOptions::new("forge");
    options.identity =
        IdentityRule::from_json(&fs::read(root.join("aliases.json")).unwrap()).unwrap();
    options.attribution = Attribution::Assignee;
    let report = run_case_study(&commits, &issues, &options).unwrap();
    let expected = render_output(&EvalOutput::Report(report), OutputFormat::Json).unwrap();
    assert_eq!(stdout_of(&output), expected);
}

fn git_available() -> bool {
    Command::new("git")
        .arg("--version")
        .output()
        .map(|out| out.status.success())
        .unwrap_or(false)
}

fn git(repo: &Path, args: &[&str]) {
    let output = Command::new("git")
        .arg("-C")
        .arg(repo)
        .args(args)
        .env("GIT_AUTHOR_DATE", "2017-03-01T10:00:00+00:00")
        .env("GIT_COMMITTER_DATE", "2017-03-01T10:00:00+00:00")
        .output()
        .expect("spawn git");
    assert!(
        output.status.success(),
        "git {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
}

fn commit(repo: &Path, name: &str, email: &str, message: &str) {
    git(
        repo,
        &[
            "-c",
            &format!("user.name={name}"),
            "-c",
            &format!("user.email={email}"),
            "commit",
            "--allow-empty",
            "-q",
            "-m",
            message,
        ],
    );
}

#[test]
fn case_study_walks_a_real_git_checkout() {
    if !git_available() {
        eprintln!("skipping: git not on PATH");
        return;
    }
    let dir = TempDir::new().unwrap();
    git(dir.path(), &["init", "-q"]);
    commit(dir.path(), "Alice Archer", "a@x.org", "FORGE-1: fix the crash");
    commit(dir.path(), "Bob Byte", "b@x.org", "refactor, refs FORGE-2");
    commit(
        dir.path(),
        "Alice Archer",
        "a@x.org",
        "polish pass\n\nCloses FORGE-4 (\"quoted\" summary)",
    );

    let output = bin()
        .arg("case-study")
        .arg("--repo")
        .arg(dir.path())
        .arg("--issues")
        .arg(fixtures_dir().join("issues.json"))
        .arg("--project")
        .arg("sample")
        .arg("--format")
        .arg("csv")
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert_eq!(
        stdout_of(&output),
        "project,commits,frequent_developer,resolved_critical\nsample,3,Alice Archer,2\n"
    );
}

#[test]
fn empty_git_repository_reports_zero_counts() {
    if !git_available() {
        eprintln!("skipping: git not on PATH");
        return;
    }
    let dir = TempDir::new().unwrap();
    git(dir.path(), &["init", "-q"]);

    let output = bin()
        .arg("case-study")
        .arg("--repo")
        .arg(dir.path())
        .arg("--issues")
        .arg(fixtures_dir().join("issues.json"))
        .arg("--project")
        .arg("empty")
        .arg("--format")
        .arg("csv")
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert_eq!(
        stdout_of(&output),
        "project,commits,frequent_developer,resolved_critical\nempty,0,,0\n"
    );
}

/// CSV output must survive a round trip through a conforming reader: the
/// re-parsed grid has exactly the engine's cells, in order, even when
/// messages carry quotes, newlines, and separator control bytes.
#[test]
fn csv_output_reparses_to_identical_cells() {
    let mut rng = StdRng::seed_from_u64(0xc5f_0a11);
    let commits = corpus::random_commits(&mut rng, 120, &["FORGE-1".to_string()]);
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("commits.jsonl"),
        fixture::commits_to_jsonl(&commits),
    )
    .unwrap();
    let text = r#"commits("commits.jsonl") | project(message, author_name)"#;
    fs::write(dir.path().join("p.pipe"), text).unwrap();

    let output = bin()
        .arg("run")
        .arg(dir.path().join("p.pipe"))
        .arg("--root")
        .arg(dir.path())
        .arg("--format")
        .arg("csv")
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));

    let rel = match evaluate(&parse(text).unwrap(), dir.path()).unwrap() {
        EvalOutput::Relation(rel) => rel,
        other => panic!("expected relation, got {other:?}"),
    };
    let mut expected: Vec<Vec<String>> = vec![rel
        .schema()
        .columns()
        .iter()
        .map(|c| c.name.clone())
        .collect()];
    for row in rel.rows() {
        expected.push(
            row.values
                .iter()
                .map(|v| match v {
                    Value::Null => String::new(),
                    Value::Text(s) => s.clone(),
                    Value::Bool(b) => b.to_string(),
                    Value::Int(n) => n.to_string(),
                    Value::Float(x) => x.to_string(),
                    Value::Timestamp(t) => t.to_string(),
                })
                .collect(),
        );
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(output.stdout.as_slice());
    let mut actual = Vec::new();
    for record in reader.records() {
        let record = record.expect("re-parse rendered csv");
        actual.push(record.iter().map(str::to_string).collect::<Vec<_>>());
    }
    assert_eq!(actual, expected);
}

/// The checked-in fixture files are byte-for-byte what the generator
/// produces, so tests that read the files and tests that call the
/// generator see one corpus.
#[test]
fn checked_in_fixtures_match_their_generator() {
    let root = fixtures_dir();
    let manifest = fixture::commit_manifest();
    let pairs: [(&str, Vec<u8>); 4] = [
        ("commits.jsonl", fixture::commits_jsonl().into_bytes()),
        ("log.records", fixture::commits_to_git_records(&manifest)),
        ("issues.json", fixture::issues_json().into_bytes()),
        ("aliases.json", fixture::aliases_json().into_bytes()),
    ];
    for (name, expected) in pairs {
        let on_disk = fs::read(root.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(
            on_disk, expected,
            "{name} drifted from the generator; regenerate with the write_fixtures example"
        );
    }
}
