//! The `zhwn` binary run against the toy fixtures.

use std::io::{Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::time::{Duration, Instant};

use serde_json::Value;
use zhwn_core::corrections::CorrectionEdit;
use zhwn_core::corrections::{EditKind, EditLog, Rule};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fx(rel: &str) -> String {
    fixtures().join(rel).display().to_string()
}

fn zhwn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zhwn"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = zhwn(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn manifest(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Builds the fixture lexicon into `dir` and returns its path.
fn build(dir: &Path) -> String {
    let lex = dir.join("lexicon.jsonl").display().to_string();
    ok(&[
        "build",
        "--wordnet",
        &fx("wordnet"),
        "--dict",
        &fx("dict/oxford.tsv"),
        "--dict",
        &fx("dict/xinhua.tsv"),
        "--out",
        &lex,
    ]);
    lex
}

#[test]
fn no_arguments_prints_usage_and_exits_1() {
    let out = zhwn(&[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage: zhwn"));
    assert_eq!(zhwn(&["--help"]).status.code(), Some(0));
    assert_eq!(zhwn(&["--version"]).status.code(), Some(0));
    assert_eq!(zhwn(&["stats", "--bogus"]).status.code(), Some(1));
    assert_eq!(zhwn(&["frobnicate"]).status.code(), Some(1));
    let out = zhwn(&["screen", "--embeddings", &fx("embeddings/toy.vec")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--lexicon"));
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(zhwn(&["stats", "--wordnet", "/nonexistent/wordnet"]).status.code(), Some(2));
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "screening.threshold = lots\n").unwrap();
    let out = zhwn(&["stats", "--wordnet", &fx("wordnet"), "--config", &bad.display().to_string()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn stats_reports_coverage_per_part_of_speech() {
    let dir = tempfile::tempdir().unwrap();
    let lex = build(dir.path());
    let out = ok(&["stats", "--wordnet", &fx("wordnet"), "--lexicon", &lex]);
    let table = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = table.lines().map(|l| l.split('\t').collect()).collect();
    assert_eq!(rows[0], ["pos", "concepts", "translated", "ratio", "lemmas"]);
    let counts: Vec<(&str, &str, &str)> = rows[1..].iter().map(|r| (r[0], r[1], r[2])).collect();
    assert_eq!(
        counts,
        [
            ("noun", "12", "12"),
            ("verb", "5", "5"),
            ("adj", "2", "2"),
            ("adv", "1", "1"),
            ("total", "20", "20")
        ]
    );
    // Without --out the manifest goes to stderr.
    let m: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(m["command"], "stats");
    assert!(m["inputs"]["wordnet"]["sha256"].as_str().is_some());
}

#[test]
fn screen_twice_gives_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let lex = build(dir.path());
    let mut digests = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(format!("{run}.jsonl")).display().to_string();
        let report = dir.path().join(format!("{run}.report.jsonl")).display().to_string();
        ok(&[
            "screen",
            "--lexicon",
            &lex,
            "--embeddings",
            &fx("embeddings/toy.vec"),
            "--config",
            &fx("zhwn.conf"),
            "--out",
            &out,
            "--report",
            &report,
        ]);
        let m = manifest(Path::new(&format!("{out}.manifest.json")));
        digests.push((
            m["run_id"].clone(),
            m["outputs"]["out"]["sha256"].clone(),
            m["outputs"]["report"]["sha256"].clone(),
            std::fs::read(&out).unwrap(),
        ));
        assert_eq!(m["config"]["screening"]["threshold"], 0.21);
    }
    assert_eq!(digests[0], digests[1]);
}

#[test]
fn screen_queues_deferred_and_flagged_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let lex = build(dir.path());
    let queue = dir.path().join("queue.jsonl");
    let q = queue.display().to_string();
    let args = [
        "screen",
        "--lexicon",
        &lex,
        "--embeddings",
        &fx("embeddings/toy.vec"),
        "--queue",
        &q,
        "--manifest",
        "/dev/null",
    ];
    ok(&args);
    let text = std::fs::read_to_string(&queue).unwrap();
    let items: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let summary: Vec<(&str, &str)> = items
        .iter()
        .map(|i| (i["candidate"].as_str().unwrap(), i["reason"].as_str().unwrap()))
        .collect();
    assert_eq!(
        summary,
        [("用枪击穿膝盖骨", "screening-deferred"), ("杂货店的男孩", "rule-flagged")]
    );
    assert_eq!(items[1]["note"], "noun+noun");
    // Re-running adds nothing.
    ok(&args);
    assert_eq!(std::fs::read_to_string(&queue).unwrap(), text);

    let queue2 = dir.path().join("queue2.jsonl").display().to_string();
    ok(&[
        "screen",
        "--lexicon",
        &lex,
        "--embeddings",
        &fx("embeddings/toy.vec"),
        "--queue",
        &queue2,
        "--no-hard-patterns",
        "--manifest",
        "/dev/null",
    ]);
    assert_eq!(std::fs::read_to_string(&queue2).unwrap().lines().count(), 1);
}

#[test]
fn apply_edits_replays_the_log() {
    let dir = tempfile::tempdir().unwrap();
    let lex = build(dir.path());
    let log_path = dir.path().join("edits.jsonl");
    let (mut log, _) = EditLog::open(&log_path).unwrap();
    let wear = "00469382-v".parse().unwrap();
    log.append(CorrectionEdit::new(
        wear,
        EditKind::DeleteLemma,
        Some("穿"),
        None,
        "lin",
        "2024-05-01T00:00:00Z",
        Rule::WrongMeaning,
    ))
    .unwrap();
    drop(log);
    let out = dir.path().join("fixed.jsonl");
    ok(&[
        "apply-edits",
        "--lexicon",
        &lex,
        "--edits",
        &log_path.display().to_string(),
        "--out",
        &out.display().to_string(),
    ]);
    let fixed = std::fs::read_to_string(&out).unwrap();
    assert!(
        fixed.contains(r#""text":"穿","source":"oxford","status":"human-dropped","decided_by":"e000001""#),
        "{fixed}"
    );
    let stats = ok(&[
        "stats",
        "--wordnet",
        &fx("wordnet"),
        "--lexicon",
        &lex,
        "--edits",
        &log_path.display().to_string(),
    ]);
    assert!(String::from_utf8_lossy(&stats.stdout).contains("total\t20\t20\t1.000\t38"));

    // A damaged log is a data error.
    let mut bytes = std::fs::read(&log_path).unwrap();
    let at = bytes.iter().position(|b| *b == b'l').unwrap();
    bytes[at] = b'L';
    std::fs::write(&log_path, bytes).unwrap();
    assert_eq!(
        zhwn(&["apply-edits", "--lexicon", &lex, "--edits", &log_path.display().to_string()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn evaluations_on_the_toy_fixtures() {
    let dir = tempfile::tempdir().unwrap();
    let lex = build(dir.path());
    let m = ["--manifest", "/dev/null"];

    let out = ok(&[
        &[
            "eval-wsd",
            "--wordnet",
            &fx("wordnet"),
            "--lexicon",
            &lex,
            "--embeddings",
            &fx("embeddings/toy.vec"),
        ][..],
        &[
            "--instances",
            &fx("wsd/instances.jsonl"),
            "--inventory",
            &fx("wsd/inventory.tsv"),
            "--baseline",
            "--format",
            "json",
        ],
        &m,
    ]
    .concat());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["micro"], 1.0);
    assert_eq!(v["baseline"]["micro"], 0.5);
    assert_eq!(v["outcomes"].as_array().unwrap().len(), 2);

    let out = ok(&[
        &[
            "eval-similarity",
            "--wordnet",
            &fx("wordnet"),
            "--lexicon",
            &lex,
            "--pairs",
            &fx("standards/pairs_toy.tsv"),
            "--scale",
            "0",
            "4",
        ][..],
        &m,
    ]
    .concat());
    assert!(String::from_utf8_lossy(&out.stdout).contains("信仰\t教条\t3.6\t1.000000"));
    let bad = zhwn(
        &[
            &[
                "eval-similarity",
                "--wordnet",
                &fx("wordnet"),
                "--lexicon",
                &lex,
                "--pairs",
                &fx("standards/pairs_toy.tsv"),
                "--scale",
                "0",
                "1",
            ][..],
            &m,
        ]
        .concat(),
    );
    assert_eq!(bad.status.code(), Some(2));

    let out = ok(&[
        &[
            "eval-relatedness",
            "--lexicon",
            &lex,
            "--embeddings",
            &fx("embeddings/toy.vec"),
            "--standard",
            &fx("standards/gloss_toy.tsv"),
            "--format",
            "json",
        ][..],
        &m,
    ]
    .concat());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ng"], 4);
    let (p, r, f) = (v["p"].as_f64().unwrap(), v["r"].as_f64().unwrap(), v["f"].as_f64().unwrap());
    assert!((f - 2.0 * p * r / (p + r)).abs() < 1e-12);
}

fn http_get(port: u16, path: &str) -> Option<String> {
    let mut s = std::net::TcpStream::connect(("127.0.0.1", port)).ok()?;
    s.set_read_timeout(Some(Duration::from_secs(5))).ok()?;
    write!(s, "GET {path} HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n").ok()?;
    let mut out = String::new();
    s.read_to_string(&mut out).ok()?;
    Some(out)
}

#[test]
fn serve_answers_on_the_configured_address() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path());
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_zhwn"))
        .args([
            "serve",
            "--wordnet",
            &fx("wordnet"),
            "--data",
            &dir.path().display().to_string(),
            "--manifest",
            "/dev/null",
        ])
        .env("ZHWN_LISTEN", format!("127.0.0.1:{port}"))
        .env("RUST_LOG", "warn")
        .stdout(Stdio::null())
        .stderr(Stdio::null())
        .spawn()
        .unwrap();
    let deadline = Instant::now() + Duration::from_secs(30);
    let reply = loop {
        if let Some(r) = http_get(port, "/api/stats") {
            break r;
        }
        assert!(Instant::now() < deadline, "service did not start");
        std::thread::sleep(Duration::from_millis(50));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(reply.starts_with("HTTP/1.1 200"), "{reply}");
    assert!(reply.contains(r#""concepts":20"#));

    let bad = Command::new(env!("CARGO_BIN_EXE_zhwn"))
        .args(["serve", "--data", &dir.path().display().to_string(), "--manifest", "/dev/null"])
        .env("ZHWN_LISTEN", "not an address")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
