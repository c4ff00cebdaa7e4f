use std::path::Path;
use std::process::{Command, Output};

fn podgen(data: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_podgen"))
        .env("PODGEN_DATA", data)
        .env_remove("PODGEN_PROVIDER_URL")
        .env("RUST_LOG", "warn")
        .args(args)
        .output()
        .unwrap()
}

fn ingested() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<String> = std::fs::read_dir(podgen::fixtures::stories_dir())
        .unwrap()
        .map(|e| e.unwrap().path().to_string_lossy().into_owned())
        .collect();
    let mut args = vec!["ingest"];
    args.extend(files.iter().map(String::as_str));
    let out = podgen(dir.path(), &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 6);
    dir
}

fn generate(data: &Path, out: &Path, condition: &str, seed: &str) -> String {
    let out_arg = out.to_string_lossy();
    let args = ["generate", "--stories", "amazon-union,suez,tesla-ntsb", "--duration", "180"];
    let o = podgen(data, &[&args[..], &["--condition", condition, "--seed", seed, "--breaks", "--out", &out_arg]].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::read_to_string(out.join("script.json")).unwrap()
}

#[test]
fn generate_is_deterministic_and_seeded() {
    let data = ingested();
    let a = generate(data.path(), &data.path().join("a"), "qa_best", "7");
    let b = generate(data.path(), &data.path().join("b"), "qa_best", "7");
    assert_eq!(a, b);
    let manifest: podgen::PodcastManifest =
        serde_json::from_str(&std::fs::read_to_string(data.path().join("a/manifest.json")).unwrap()).unwrap();
    manifest.validate().unwrap();
    assert!(data.path().join("a/audio").join(&manifest.lines[0].audio_ref).is_file());

    let r7 = generate(data.path(), &data.path().join("r7"), "qa_rand", "7");
    let r8 = generate(data.path(), &data.path().join("r8"), "qa_rand", "8");
    assert_ne!(r7, r8);
}

#[test]
fn stats_counts_listener_actions() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("events.jsonl");
    let ev = |kind: &str| format!(r#"{{"podcast_id":"p1","kind":"{kind}","at_line":"l","timestamp":"2021-03-01T10:00:00Z"}}"#);
    let lines = [ev("play"), ev("pause"), ev("pause"), ev("skip"), ev("transcript_open"), ev("question_asked")];
    std::fs::write(&log, lines.join("\n")).unwrap();
    let out = podgen(dir.path(), &["stats", "--events", log.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row: Vec<&str> = stdout.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row, ["p1", "2", "1", "1", "1"]);
}

#[test]
fn failures_exit_with_one() {
    let data = ingested();
    let out = podgen(data.path(), &["generate", "--stories", "nope", "--out", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
    let out = podgen(data.path(), &["stats", "--events", "missing.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn graph_as_json_and_dot() {
    let data = ingested();
    let out = podgen(data.path(), &["graph", "--story", "iceberg"]);
    assert!(out.status.success());
    let g: podgen::qagraph::QAGraph = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(g.paragraphs().len(), 9);
    let out = podgen(data.path(), &["graph", "--story", "iceberg", "--format", "dot"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("graph qa {"));
}
