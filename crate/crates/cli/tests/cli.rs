//! Exit-code and flag contracts for the dimrank binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dimrank::replay::{replay, Protocol, RankMode};
use dimrank::scorers::{ScorerSet, UserProfile};
use dimrank::session::{read_sessions_from_path, resolve_sessions};
use dimrank::DimensionId;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dimrank"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must run")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn generate_corpus(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let corpus = dir.join("corpus.jsonl");
    let mut args = vec![
        "generate",
        "--output",
        corpus.to_str().unwrap(),
        "--sessions",
        "4",
        "--seed",
        "11",
    ];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    corpus
}

#[test]
fn corrupted_line_is_reported_with_its_number_and_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &[]);
    let mut lines: Vec<String> = fs::read_to_string(&corpus)
        .unwrap()
        .lines()
        .map(|l| l.to_string())
        .collect();
    assert!(
        lines.len() >= 17,
        "need at least 17 lines, got {}",
        lines.len()
    );
    lines[16] = "{\"broken\": true".to_string();
    fs::write(&corpus, lines.join("\n")).unwrap();

    let out = run(&["rerank", "--input", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("line 17"), "stderr: {}", stderr(&out));
}

#[test]
fn unknown_mode_is_a_config_error_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &[]);
    let out = run(&[
        "rerank",
        "--input",
        corpus.to_str().unwrap(),
        "--mode",
        "fixed:velocity",
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unknown_flag_is_a_config_error_exit_3() {
    let out = run(&["rerank", "--nonsense"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn stability_without_eligible_sessions_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    // Single-query sessions are never eligible for the stability statistic.
    let corpus = generate_corpus(dir.path(), &["--queries", "1"]);
    let out = run(&["analyze-stability", "--input", corpus.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn unwritable_output_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &[]);
    let out = run(&[
        "rerank",
        "--input",
        corpus.to_str().unwrap(),
        "--output",
        "/nonexistent-dir/rankings.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn missing_input_exits_5() {
    let out = run(&["rerank", "--input", "/nonexistent-dir/corpus.jsonl"]);
    assert_eq!(out.status.code(), Some(5), "{}", stderr(&out));
}

#[test]
fn eval_k_flag_selects_columns() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &[]);
    let report = dir.path().join("report.csv");
    let out = run(&[
        "eval",
        "--input",
        corpus.to_str().unwrap(),
        "--k",
        "1,5",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(&report).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "strategy,ndcg@1,ndcg@5,n_queries");
    assert_eq!(csv.lines().count(), 9, "7 fixed rows + weighted + header");
}

#[test]
fn fixed_mode_output_matches_library_single_dimension_replay() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &[]);
    let rankings_path = dir.path().join("rankings.jsonl");
    let out = run(&[
        "rerank",
        "--input",
        corpus.to_str().unwrap(),
        "--mode",
        "fixed:reliability",
        "--output",
        rankings_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let sessions = read_sessions_from_path(&corpus).unwrap();
    let resolved =
        resolve_sessions(&sessions, &ScorerSet::empty(), &UserProfile::default()).unwrap();
    let expected: Vec<_> = replay(
        &resolved,
        Protocol::WithinSession,
        RankMode::Fixed(DimensionId::Reliability),
    )
    .unwrap()
    .into_iter()
    .filter(|r| r.informed)
    .collect();

    let text = fs::read_to_string(&rankings_path).unwrap();
    let records: Vec<serde_json::Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), expected.len());
    for (record, exp) in records.iter().zip(&expected) {
        assert_eq!(record["query_id"].as_str().unwrap(), exp.query_id);
        assert_eq!(record["mode"].as_str().unwrap(), "fixed:reliability");
        assert_eq!(record["provenance"].as_str().unwrap(), "fixed");
        let got_docs: Vec<&str> = record["ranking"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e["doc_id"].as_str().unwrap())
            .collect();
        let want_docs: Vec<&str> = exp.ranking.doc_ids().collect();
        assert_eq!(got_docs, want_docs);
    }
}

#[test]
fn rerank_covers_all_but_the_first_query_of_each_session() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &["--queries", "3"]);
    let rankings_path = dir.path().join("rankings.jsonl");
    let out = run(&[
        "rerank",
        "--input",
        corpus.to_str().unwrap(),
        "--output",
        rankings_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&rankings_path).unwrap();
    // 4 sessions × 3 queries, minus the cold-start query of each session.
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn cross_session_protocol_emits_later_sessions_last_queries() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(dir.path(), &[]);
    let rankings_path = dir.path().join("rankings.jsonl");
    let out = run(&[
        "rerank",
        "--input",
        corpus.to_str().unwrap(),
        "--protocol",
        "cross-session",
        "--output",
        rankings_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&rankings_path).unwrap();
    // 4 sessions, minus the cold-start first session.
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn one_hot_planted_preference_lands_in_the_truth_file() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    let truth = dir.path().join("truth.json");
    let out = run(&[
        "generate",
        "--output",
        corpus.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
        "--sessions",
        "3",
        "--planted",
        "one-hot:interest",
        "--noise",
        "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let parsed: std::collections::BTreeMap<String, Vec<f64>> =
        serde_json::from_str(&fs::read_to_string(&truth).unwrap()).unwrap();
    assert_eq!(parsed.len(), 3);
    let interest = DimensionId::Interest.index();
    for weights in parsed.values() {
        for (j, w) in weights.iter().enumerate() {
            assert_eq!(*w, if j == interest { 1.0 } else { 0.0 });
        }
    }
}

#[test]
fn bad_planted_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    for planted in ["0.5,0.5", "one-hot:velocity", "concentrated:fast"] {
        let out = run(&[
            "generate",
            "--output",
            corpus.to_str().unwrap(),
            "--planted",
            planted,
        ]);
        assert_eq!(out.status.code(), Some(3), "planted value '{planted}'");
    }
}

#[test]
fn scorer_config_is_honored_for_unscored_logs() {
    let dir = tempfile::tempdir().unwrap();
    // Two-query session without scores: the scorer stack must run.
    let log = dir.path().join("log.jsonl");
    let doc = |id: &str, host: &str| {
        format!(
            "{{\"doc_id\": \"{id}\", \"host\": \"{host}\", \"title\": \"t\", \"body_len\": 100, \
             \"sentence_avg_len\": 10.0, \"publish_rank\": 1, \"text\": \"alpha beta\"}}"
        )
    };
    let lines = format!(
        "{{\"session_id\": \"s\", \"query_id\": \"q1\", \"ts\": 0, \"query\": \"alpha\", \
         \"docs\": [{}, {}], \"sat_clicks\": [\"a\"]}}\n\
         {{\"session_id\": \"s\", \"query_id\": \"q2\", \"ts\": 1, \"query\": \"alpha\", \
         \"docs\": [{}, {}], \"sat_clicks\": [\"b\"]}}\n",
        doc("a", "t.example"),
        doc("b", "other.example"),
        doc("a", "t.example"),
        doc("b", "other.example"),
    );
    fs::write(&log, lines).unwrap();
    let config = dir.path().join("scorers.json");
    fs::write(
        &config,
        r#"{"profile": {"trusted_hosts": ["t.example"], "host_click_counts": {"t.example": 9}}}"#,
    )
    .unwrap();

    let out = run(&[
        "rerank",
        "--input",
        log.to_str().unwrap(),
        "--scorer-config",
        config.to_str().unwrap(),
        "--mode",
        "fixed:reliability",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let record: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    // Doc a sits on the trusted host, so reliability must rank it first.
    assert_eq!(record["ranking"][0]["doc_id"].as_str().unwrap(), "a");

    let bad_config = dir.path().join("bad.json");
    fs::write(&bad_config, r#"{"scorers": {"habit": "mystery"}}"#).unwrap();
    let out = run(&[
        "rerank",
        "--input",
        log.to_str().unwrap(),
        "--scorer-config",
        bad_config.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}
