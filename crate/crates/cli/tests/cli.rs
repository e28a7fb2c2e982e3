//! End-to-end checks of the `nesent` binary against the bundled toy
//! data.

use std::path::Path;
use std::process::{Command, Output};

fn toy_config() -> &'static str {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/toy/config.json")
}

fn nesent(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nesent"))
        .args(["--config", toy_config(), "--output-dir"])
        .arg(out_dir)
        .args(args)
        .output()
        .expect("spawn nesent")
}

#[test]
fn stats_reports_split_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = nesent(dir.path(), &["stats"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("total 32"), "unexpected stats: {stdout}");
    assert!(dir.path().join("split_summary.json").exists());
    assert!(dir.path().join("effective_config.json").exists());
}

#[test]
fn ne_polarity_writes_map_and_stats() {
    let dir = tempfile::tempdir().unwrap();
    let out = nesent(dir.path(), &["ne-polarity"]);
    assert!(out.status.success());
    let map = std::fs::read_to_string(dir.path().join("ne_polarity.jsonl")).unwrap();
    assert!(map.contains("\"surface\":\"velora\""));
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("ne_stats.json")).unwrap())
            .unwrap();
    assert_eq!(stats["e_nes"], 3);
    assert_eq!(stats["a_nes"], 2);
}

#[test]
fn tag_replaces_entities_in_both_splits() {
    let dir = tempfile::tempdir().unwrap();
    assert!(nesent(dir.path(), &["tag"]).status.success());
    let tagged = std::fs::read_to_string(dir.path().join("tagged_corpus.jsonl")).unwrap();
    assert!(tagged.contains("PosNE"));
    assert!(tagged.contains("NegNE"));
    assert!(!tagged.contains("velora"));
    assert!(!tagged.contains("grimsby"));
    // The tied entity keeps its surface form.
    assert!(tagged.contains("ostrava"));
}

#[test]
fn train_classify_evaluate_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(nesent(dir.path(), &["train", "--model", "nb"]).status.success());
    let model = dir.path().join("model_nb.json");
    assert!(model.exists());
    assert!(nesent(dir.path(), &["classify", "--with", model.to_str().unwrap()])
        .status
        .success());
    let predictions = dir.path().join("predictions.jsonl");
    let out = nesent(
        dir.path(),
        &["evaluate", "--predictions", predictions.to_str().unwrap()],
    );
    assert!(out.status.success());
    assert!(dir.path().join("metrics.json").exists());
}

#[test]
fn classify_with_lexicon_sfs() {
    let dir = tempfile::tempdir().unwrap();
    let out = nesent(dir.path(), &["classify", "--with", "lexicon_sfs"]);
    assert!(out.status.success());
    let lines = std::fs::read_to_string(dir.path().join("predictions.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 9, "one prediction per test doc");
}

/// DP needs fractional weights, so NE tags (weight ±1) are excluded by
/// running without entity tagging.
#[test]
fn classify_with_lexicon_dp_without_ne_tags() {
    let dir = tempfile::tempdir().unwrap();
    let toy = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy");
    let mut config: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(toy.join("config.json")).unwrap()).unwrap();
    config["use_nes"] = false.into();
    config["corpus"]["path"] = toy.join("corpus.jsonl").to_str().unwrap().into();
    config["annotations"]["gazetteer"] = toy.join("gazetteer.tsv").to_str().unwrap().into();
    config["lexicons"] = vec![toy.join("lexicon.tsv").to_str().unwrap()].into();
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();

    let out = Command::new(env!("CARGO_BIN_EXE_nesent"))
        .args(["--config", config_path.to_str().unwrap(), "--output-dir"])
        .arg(dir.path())
        .args(["classify", "--with", "lexicon_dp"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines = std::fs::read_to_string(dir.path().join("predictions.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 9);
}

#[test]
fn domain_error_exits_one_usage_error_exits_two() {
    let missing = Command::new(env!("CARGO_BIN_EXE_nesent"))
        .args(["--config", "/does/not/exist.json", "stats"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let bogus = Command::new(env!("CARGO_BIN_EXE_nesent"))
        .args(["--config", toy_config(), "frobnicate"])
        .output()
        .unwrap();
    assert_eq!(bogus.status.code(), Some(2));
}

#[test]
fn commands_do_not_mutate_inputs() {
    let corpus_path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/toy/corpus.jsonl");
    let before = std::fs::read(corpus_path).unwrap();
    let dir = tempfile::tempdir().unwrap();
    assert!(nesent(dir.path(), &["ablate"]).status.success());
    assert_eq!(before, std::fs::read(corpus_path).unwrap());
}
