//! Binary-level checks: file outputs, stdout counts, and exit codes
//! (0 success, 1 usage, 2 data, 3 numeric).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use emogan_cli::formats::{load_model, read_dataset, save_model};

fn emogan() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emogan"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    emogan().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn vectorize_tiny_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    fs::write(&corpus, "{\"text\": \"Good :). Nothing here. Bad :(!\"}\n").unwrap();
    let out = dir.path().join("dataset.jsonl");
    let output = run(&[
        "vectorize",
        "--dictionary",
        fixture("dictionary.json").to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--dim",
        "8",
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("sentences: 3  labelled: 2  dropped: 1"));
    let dataset = read_dataset(&out).unwrap();
    assert_eq!(dataset.len(), 2);
    assert_eq!(dataset[0].embedding.len(), 8);
}

#[test]
fn vectorize_empty_corpus_succeeds_with_zero_counts() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("empty.jsonl");
    fs::write(&corpus, "").unwrap();
    let out = dir.path().join("dataset.jsonl");
    let output = run(&[
        "vectorize",
        "--dictionary",
        fixture("dictionary.json").to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("sentences: 0"));
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn vectorize_reports_malformed_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.jsonl");
    fs::write(&corpus, "{\"text\": \"ok :)\"}\n{not json}\n").unwrap();
    let output = run(&[
        "vectorize",
        "--dictionary",
        fixture("dictionary.json").to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
        "--output",
        dir.path().join("out.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("line 2"), "{}", stderr(&output));
}

#[test]
fn dictionary_missing_class_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let dict = dir.path().join("dict.json");
    fs::write(
        &dict,
        r#"{"fear":[],"sadness":[],"anger":[],"disgust":[],"happiness":[":)"],"surprise":[]}"#,
    )
    .unwrap();
    let corpus = dir.path().join("corpus.jsonl");
    fs::write(&corpus, "{\"text\": \"x :)\"}\n").unwrap();
    let output = run(&[
        "vectorize",
        "--dictionary",
        dict.to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
        "--output",
        dir.path().join("out.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("calm"), "{}", stderr(&output));
}

/// Two exact-duplicate groups; the first carries three different labels
/// (Z = 3 > k = 2), the second is single-label.
fn conflict_fixture(dir: &Path) -> PathBuf {
    let path = dir.join("conflict.jsonl");
    let mut lines = String::new();
    for class in [0, 1, 2] {
        let mut emotions = [0u8; 7];
        emotions[class] = 1;
        lines.push_str(&format!(
            "{{\"embedding\": [1.0, 0.0, 0.0], \"emotions\": {:?}}}\n",
            emotions.to_vec()
        ));
    }
    for _ in 0..2 {
        lines.push_str("{\"embedding\": [0.0, 1.0, 0.0], \"emotions\": [0, 0, 0, 0, 0, 1, 0]}\n");
    }
    fs::write(&path, lines).unwrap();
    path
}

#[test]
fn find_collisions_flags_conflicting_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let input = conflict_fixture(dir.path());
    let out = dir.path().join("out");
    let output = run(&[
        "find-collisions",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--tau",
        "0.95",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("flagged clusters: 1"));
    let filtered = read_dataset(&out.join("filtered.jsonl")).unwrap();
    assert_eq!(filtered.len(), 2);
    let flagged = read_dataset(&out.join("flagged.jsonl")).unwrap();
    assert_eq!(flagged.iter().filter(|e| e.collision).count(), 3);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("collision_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["clusters"].as_array().unwrap().len(), 2);
    assert_eq!(report["clusters"][0]["Z"], 3);
    assert_eq!(report["clusters"][0]["collision"], true);
}

#[test]
fn find_collisions_k_seven_never_flags() {
    let dir = tempfile::tempdir().unwrap();
    let input = conflict_fixture(dir.path());
    let out = dir.path().join("out");
    let output = run(&[
        "find-collisions",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "7",
        "--tau",
        "0.95",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    assert!(stdout(&output).contains("flagged clusters: 0"));
}

#[test]
fn invalid_collision_params_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let input = conflict_fixture(dir.path());
    for args in [["--k", "0"], ["--k", "8"], ["--tau", "1.5"]] {
        let output = run(&[
            "find-collisions",
            "--input",
            input.to_str().unwrap(),
            args[0],
            args[1],
            "--output-dir",
            dir.path().join("o").to_str().unwrap(),
        ]);
        assert_eq!(output.status.code(), Some(1), "args {args:?}");
    }
}

#[test]
fn unknown_flag_exits_one_and_help_exits_zero() {
    let output = run(&["train", "--no-such-flag"]);
    assert_eq!(output.status.code(), Some(1));
    let output = run(&["--help"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).contains("vectorize"));
}

#[test]
fn exploding_loss_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let dataset = dir.path().join("synth.jsonl");
    let output = run(&[
        "synth",
        "--dim",
        "8",
        "--examples-per-combo",
        "2",
        "--seed",
        "1",
        "--output",
        dataset.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let output = run(&[
        "train",
        "--input",
        dataset.to_str().unwrap(),
        "--output-dir",
        dir.path().join("run").to_str().unwrap(),
        "--seed",
        "1",
        "--lr",
        "1e300",
    ]);
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr(&output).contains("not finite"));
}

#[test]
fn missing_input_file_is_a_data_error() {
    let output = run(&[
        "train",
        "--input",
        "/nonexistent/dataset.jsonl",
        "--output-dir",
        "/tmp/never",
        "--seed",
        "1",
    ]);
    assert_eq!(output.status.code(), Some(2));
}

fn synth_and_train(dir: &Path, dim: usize, seed: u64) -> (PathBuf, PathBuf) {
    let dataset = dir.join("synth.jsonl");
    let output = run(&[
        "synth",
        "--dim",
        &dim.to_string(),
        "--noise-sigma",
        "0.0",
        "--examples-per-combo",
        "5",
        "--seed",
        &seed.to_string(),
        "--output",
        dataset.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let run_dir = dir.join("run");
    let output = run(&[
        "train",
        "--input",
        dataset.to_str().unwrap(),
        "--output-dir",
        run_dir.to_str().unwrap(),
        "--seed",
        &(seed + 1).to_string(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    (dataset, run_dir)
}

#[test]
fn train_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let (_, run_dir) = synth_and_train(dir.path(), 16, 300);
    for name in [
        "dataset2.jsonl",
        "model.json",
        "curves.json",
        "report.json",
        "report.txt",
        "records.jsonl",
    ] {
        assert!(run_dir.join(name).exists(), "{name} missing");
    }
    let dataset2 = fs::read_to_string(run_dir.join("dataset2.jsonl")).unwrap();
    assert_eq!(dataset2.lines().count(), 128);
    let curves: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run_dir.join("curves.json")).unwrap()).unwrap();
    assert_eq!(curves["generator"].as_array().unwrap().len(), 10);
    assert_eq!(curves["discriminator_train"].as_array().unwrap().len(), 50);
}

#[test]
fn model_file_roundtrips_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (_, run_dir) = synth_and_train(dir.path(), 16, 400);
    let path = run_dir.join("model.json");
    let original = fs::read(&path).unwrap();
    let model = load_model(&path).unwrap();
    let copy = run_dir.join("model_copy.json");
    save_model(&copy, &model).unwrap();
    assert_eq!(original, fs::read(&copy).unwrap());
    // the weights must round-trip into working models
    let (gen, disc) = model.to_models().unwrap();
    assert_eq!(gen.dim(), 16);
    assert_eq!(disc.dim(), 16);
}

#[test]
fn dataset_rewrite_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, run_dir) = synth_and_train(dir.path(), 16, 500);
    let examples = read_dataset(&dataset).unwrap();
    let copy = dir.path().join("copy.jsonl");
    emogan_cli::formats::write_dataset(&copy, &examples, false).unwrap();
    assert_eq!(fs::read(&dataset).unwrap(), fs::read(&copy).unwrap());

    let d2_path = run_dir.join("dataset2.jsonl");
    let dataset2 = emogan_cli::formats::read_dataset2(&d2_path).unwrap();
    let d2_copy = dir.path().join("dataset2_copy.jsonl");
    emogan_cli::formats::write_dataset2(&d2_copy, &dataset2).unwrap();
    assert_eq!(fs::read(&d2_path).unwrap(), fs::read(&d2_copy).unwrap());
}

#[test]
fn predict_overfit_toy_model_covers_gold_classes() {
    let dir = tempfile::tempdir().unwrap();
    let (_, run_dir) = synth_and_train(dir.path(), 16, 600);
    let predictions = dir.path().join("pred.jsonl");
    let output = run(&[
        "predict",
        "--model",
        run_dir.join("model.json").to_str().unwrap(),
        "--input",
        run_dir.join("dataset2.jsonl").to_str().unwrap(),
        "--output",
        predictions.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));

    let dataset2: Vec<serde_json::Value> = fs::read_to_string(run_dir.join("dataset2.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let forecasts: Vec<serde_json::Value> = fs::read_to_string(&predictions)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(forecasts.len(), 128);
    for (pair, forecast) in dataset2.iter().zip(&forecasts) {
        let sum: f64 = forecast["forecast"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-9);
        let active: Vec<usize> = pair["emotions"]
            .as_array()
            .unwrap()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.as_u64() == Some(1))
            .map(|(i, _)| i)
            .collect();
        let top2: Vec<usize> = forecast["top2"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap() as usize)
            .collect();
        if (1..=2).contains(&active.len()) {
            for class in &active {
                assert!(top2.contains(class), "gold {active:?} top2 {top2:?}");
            }
        }
    }
}

#[test]
fn predict_table_marks_top2() {
    let dir = tempfile::tempdir().unwrap();
    let (_, run_dir) = synth_and_train(dir.path(), 16, 700);
    let input = dir.path().join("one.jsonl");
    let mut embedding = vec![0.0; 16];
    embedding[0] = 1.0;
    fs::write(
        &input,
        format!("{{\"embedding\": {embedding:?}, \"text\": \"probe\"}}\n"),
    )
    .unwrap();
    let output = run(&[
        "predict",
        "--model",
        run_dir.join("model.json").to_str().unwrap(),
        "--input",
        input.to_str().unwrap(),
        "--table",
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    let text = stdout(&output);
    // the JSON line plus a table with exactly two starred cells
    let json_line: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let top2: Vec<usize> = json_line["top2"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();
    assert_eq!(top2.len(), 2);
    let table_row = text.lines().last().unwrap();
    assert_eq!(table_row.matches('*').count(), 2);
    assert!(table_row.contains("probe"));
}

#[test]
fn evaluate_writes_report_files() {
    let dir = tempfile::tempdir().unwrap();
    let (dataset, run_dir) = synth_and_train(dir.path(), 16, 800);
    let eval_dir = dir.path().join("eval");
    let output = run(&[
        "evaluate",
        "--model",
        run_dir.join("model.json").to_str().unwrap(),
        "--input",
        dataset.to_str().unwrap(),
        "--output-dir",
        eval_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(stdout(&output).contains("MEAN"));
    for name in ["report.json", "report.txt", "records.jsonl"] {
        assert!(eval_dir.join(name).exists(), "{name} missing");
    }
}

#[test]
fn synth_rejects_small_dimension() {
    let output = run(&[
        "synth",
        "--dim",
        "6",
        "--seed",
        "1",
        "--output",
        "/tmp/never.jsonl",
    ]);
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn pipeline_config_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(
        &config,
        format!(
            r#"{{
  "dim": 24,
  "dictionary": {:?},
  "corpus": {:?},
  "generator": {{ "epochs": 2 }},
  "discriminator": {{ "epochs": 2 }}
}}"#,
            fixture("dictionary.json"),
            fixture("corpus.jsonl")
        ),
    )
    .unwrap();
    // no seed anywhere: usage error
    let output = run(&[
        "pipeline",
        "--config",
        config.to_str().unwrap(),
        "--output-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("seed"));

    // seed from a flag override completes the run
    let output = run(&[
        "pipeline",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "9",
        "--output-dir",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr(&output));
    assert!(dir.path().join("out/model.json").exists());
    assert!(dir.path().join("out/report.txt").exists());
}

#[test]
fn pipeline_rejects_unknown_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"sead": 1}"#).unwrap();
    let output = run(&["pipeline", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr(&output).contains("sead"));
}
