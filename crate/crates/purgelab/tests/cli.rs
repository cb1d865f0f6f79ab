//! End-to-end tests of the `purgelab` binary: outputs, exit codes, and
//! reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use purgelab::datakit::{load_csv, make_blobs, save_csv, LabelColumn};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_purgelab")
}

fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin()).args(args).env_remove("PURGELAB_SEED").output().expect("binary runs")
}

fn write_blobs_csv(dir: &Path, name: &str, classes: usize, per_class: usize, spread: f64, seed: u64) -> PathBuf {
    let ds = make_blobs(classes, per_class, 2, spread, seed).unwrap();
    let path = dir.join(name);
    save_csv(&ds, &path).unwrap();
    path
}

#[test]
fn filter_on_clean_data_removes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "clean.csv", 2, 20, 0.05, 4);
    let out = run([
        "filter",
        "--data",
        data.to_str().unwrap(),
        "--mode",
        "ensemble",
        "--threshold",
        "0.7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let original = load_csv(&data, &LabelColumn::Name("class".into()), None).unwrap();
    let filtered = load_csv(
        &dir.path().join("clean.filtered.csv"),
        &LabelColumn::Name("class".into()),
        None,
    )
    .unwrap();
    assert_eq!(original.instances, filtered.instances);

    let report = std::fs::read_to_string(dir.path().join("clean.removed.csv")).unwrap();
    assert_eq!(report.lines().count(), 1, "only the header expected: {report}");
}

#[test]
fn missing_file_is_a_data_error_naming_the_path() {
    let out = run(["filter", "--data", "/nonexistent/ghost.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("ghost.csv"), "{stderr}");
}

#[test]
fn bad_threshold_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "d.csv", 2, 10, 0.2, 1);
    let out = run([
        "filter",
        "--data",
        data.to_str().unwrap(),
        "--threshold",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_learner_id_is_reported_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "d.csv", 2, 10, 0.2, 1);
    let config = serde_json::json!({
        "schema": "purgelab-run-config/1",
        "seed": 1,
        "repeats": 1,
        "folds": 2,
        "datasets": [{"path": data.to_str().unwrap()}],
        "learners": ["quantum-forest"],
        "conditions": ["none"],
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = run(["run", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("quantum-forest"), "{stderr}");
}

#[test]
fn run_grid_has_the_planned_cell_count() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "grid.csv", 2, 20, 0.3, 7);
    let config = serde_json::json!({
        "schema": "purgelab-run-config/1",
        "seed": 9,
        "repeats": 1,
        "folds": 2,
        "datasets": [{"path": data.to_str().unwrap()}],
        "learners": ["knn:k=3", "naive-bayes"],
        "conditions": ["none", "ensemble@0.5"],
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out_dir = dir.path().join("out");
    let out = run([
        "run",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("master seed: 9"), "{stdout}");

    let csv = std::fs::read_to_string(out_dir.join("results.csv")).unwrap();
    // header + 2 learners x 2 conditions x 1 repeat x 2 folds
    assert_eq!(csv.lines().count(), 1 + 8, "{csv}");
    let json = std::fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(json.contains("purgelab-summary/1"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "rerun.csv", 3, 15, 0.4, 5);
    let config = serde_json::json!({
        "schema": "purgelab-run-config/1",
        "seed": 21,
        "repeats": 2,
        "folds": 3,
        "datasets": [{"path": data.to_str().unwrap()}],
        "learners": ["knn:k=3", "one-rule"],
        "conditions": ["none", "ensemble@0.5", "vote"],
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();

    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let out = run([
            "run",
            "--config",
            config_path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push((
            std::fs::read(out_dir.join("results.csv")).unwrap(),
            std::fs::read(out_dir.join("summary.json")).unwrap(),
        ));
    }
    assert_eq!(outputs[0].0, outputs[1].0);
    assert_eq!(outputs[0].1, outputs[1].1);
}

#[test]
fn measures_emit_both_csv_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "m.csv", 2, 20, 0.3, 3);
    let out = run([
        "measures",
        "--data",
        data.to_str().unwrap(),
        "--folds",
        "4",
        "--repeats",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let per_instance = std::fs::read_to_string(dir.path().join("m.instances.csv")).unwrap();
    let mut lines = per_instance.lines();
    assert_eq!(lines.next().unwrap(), "index,IH,kDN,DS,DCP,TD,CL,CLD,MV,CB");
    assert_eq!(per_instance.lines().count(), 1 + 40);

    let per_dataset = std::fs::read_to_string(dir.path().join("m.dataset.csv")).unwrap();
    let mut lines = per_dataset.lines();
    assert_eq!(lines.next().unwrap(), "F2,F3,F4,N1,N2,N3,T1,T2,noisy_pct");
    assert_eq!(per_dataset.lines().count(), 2);
}

#[test]
fn cod_clusters_learners_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_blobs_csv(dir.path(), "a.csv", 2, 25, 0.4, 11);
    let b = write_blobs_csv(dir.path(), "b.csv", 3, 15, 0.5, 12);
    let out = run([
        "cod",
        "--data",
        &format!("{},{}", a.display(), b.display()),
        "--learners",
        "knn:k=1,knn:k=1,naive-bayes",
        "--cut",
        "0.18",
        "--folds",
        "3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    // Duplicated knn specs have COD 0 and must land in one cluster.
    assert!(stdout.contains("knn:k=1, knn:k=1"), "{stdout}");
    assert!(dir.path().join("dendrogram.txt").exists());
    let merges = std::fs::read_to_string(dir.path().join("merges.csv")).unwrap();
    assert!(merges.starts_with("leaf_a,leaf_b,height\n"));
}

#[test]
fn cod_requires_datasets() {
    let out = run(["cod", "--learners", "all"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn noise_injects_and_reports_ground_truth() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "n.csv", 2, 20, 0.3, 2);
    let out = run([
        "noise",
        "--data",
        data.to_str().unwrap(),
        "--rate",
        "0.25",
        "--seed",
        "8",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let corrupted = std::fs::read_to_string(dir.path().join("n.corrupted.csv")).unwrap();
    assert_eq!(corrupted.lines().count(), 1 + 10); // header + round(0.25 * 40)

    let original = load_csv(&data, &LabelColumn::Name("class".into()), None).unwrap();
    let noisy = load_csv(
        &dir.path().join("n.noisy.csv"),
        &LabelColumn::Name("class".into()),
        None,
    )
    .unwrap();
    let changed = original
        .instances
        .iter()
        .zip(&noisy.instances)
        .filter(|(a, b)| a.label != b.label)
        .count();
    assert_eq!(changed, 10);
}

#[test]
fn arff_inputs_round_trip_through_filter() {
    let dir = tempfile::tempdir().unwrap();
    let ds = make_blobs(2, 15, 2, 0.1, 6).unwrap();
    let arff_path = dir.path().join("tiny.arff");
    purgelab::datakit::save_arff(&ds, &arff_path).unwrap();
    let out = run([
        "filter",
        "--data",
        arff_path.to_str().unwrap(),
        "--mode",
        "biased",
        "--learner",
        "knn:k=1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let filtered = purgelab::datakit::load_arff(&dir.path().join("tiny.filtered.arff")).unwrap();
    assert_eq!(filtered.instances, ds.instances); // 1-NN memorizes: nothing removed
}

#[test]
fn seed_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_blobs_csv(dir.path(), "s.csv", 2, 15, 0.3, 2);
    let out = Command::new(bin())
        .args([
            "noise",
            "--data",
            data.to_str().unwrap(),
            "--rate",
            "0.1",
            "--out",
            dir.path().join("x").to_str().unwrap(),
        ])
        .env("PURGELAB_SEED", "777")
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("master seed: 777"), "{stdout}");
}
