//! End-to-end tests of the `pegasos` binary: flag handling, exit codes,
//! output formats, and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_pegasos")
}

fn run(args: &[&str]) -> Output {
    Command::new(binary())
        .args(args)
        .env_remove("PEGASOS_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

/// Small separable dataset: 6 positives around +1, 14 negatives
/// around −1, two features.
fn write_dataset(dir: &Path) -> PathBuf {
    let mut csv = String::from("f1,f2,class\n");
    for i in 0..6 {
        let jitter = i as f64 * 0.05;
        csv.push_str(&format!("{},{},yes\n", 1.0 + jitter, 1.2 - jitter));
    }
    for i in 0..14 {
        let jitter = i as f64 * 0.03;
        csv.push_str(&format!("{},{},no\n", -1.0 - jitter, -0.8 + jitter));
    }
    let path = dir.join("toy.csv");
    std::fs::write(&path, csv).unwrap();
    path
}

/// Overlapping-classes dataset: AUC improves gradually during training,
/// so stop-parameter probes observe several waiting times.
fn write_noisy_dataset(dir: &Path) -> PathBuf {
    let csv = "\
f1,f2,class
0.178,-0.214,yes
0.434,-0.121,yes
-0.094,0.323,yes
1.269,1.041,yes
1.024,-0.001,yes
0.659,0.098,yes
0.076,-0.209,yes
0.143,1.269,yes
1.126,1.052,yes
1.081,-0.052,yes
-0.904,-0.271,no
-0.229,0.138,no
0.008,-1.244,no
-0.431,-0.191,no
-0.590,-1.080,no
-0.642,-1.239,no
0.095,0.158,no
-0.524,-0.860,no
0.054,-0.370,no
0.012,0.126,no
-0.587,-0.655,no
-0.442,-0.624,no
-1.142,-0.851,no
-0.100,-1.322,no
-1.326,-0.273,no
-0.951,-0.438,no
-0.646,-0.783,no
0.196,-1.048,no
-0.740,-1.035,no
-0.388,-0.903,no
";
    let path = dir.join("noisy.csv");
    std::fs::write(&path, csv).unwrap();
    path
}

fn data_flags(path: &Path) -> Vec<String> {
    vec![
        "--data".into(),
        path.display().to_string(),
        "--target-col".into(),
        "class".into(),
        "--positive-label".into(),
        "yes".into(),
    ]
}

/// Run `<subcommand> <data flags> <rest>` — rest[0] is the subcommand.
fn run_with(path_args: &[String], rest: &[&str]) -> Output {
    let mut args: Vec<String> = vec![rest[0].to_string()];
    args.extend(path_args.iter().cloned());
    args.extend(rest[1..].iter().map(|s| s.to_string()));
    Command::new(binary())
        .args(&args)
        .env_remove("PEGASOS_SEED")
        .output()
        .expect("binary runs")
}

fn model_json_without_timestamp(path: &Path) -> serde_json::Value {
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    value["provenance"]["timestamp"] = serde_json::Value::from(0u64);
    value
}

#[test]
fn train_writes_model_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let model_a = dir.path().join("a.json");
    let model_b = dir.path().join("b.json");
    let base = data_flags(&data);

    let out_a = run_with(
        &base,
        &[
            "train", "--lambda", "0.1", "--bias", "0.25", "--check-every", "5",
            "--iterations", "200", "--seed", "7", "--output", model_a.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out_a), 0, "{}", String::from_utf8_lossy(&out_a.stderr));
    let text = stdout(&out_a);
    assert!(text.contains("training AUC: "), "{text}");
    assert!(text.contains("iterations run: "), "{text}");

    let out_b = run_with(
        &base,
        &[
            "train", "--lambda", "0.1", "--bias", "0.25", "--check-every", "5",
            "--iterations", "200", "--seed", "7", "--output", model_b.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out_b), 0);
    assert_eq!(stdout(&out_a).replace("a.json", ""), stdout(&out_b).replace("b.json", ""));
    assert_eq!(
        model_json_without_timestamp(&model_a),
        model_json_without_timestamp(&model_b)
    );
}

#[test]
fn train_flag_validation_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let model = dir.path().join("m.json");

    // Zero iterations: input error.
    let out = run_with(
        &base,
        &[
            "train", "--lambda", "0.1", "--bias", "0.0", "--check-every", "1",
            "--iterations", "0", "--output", model.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);

    // rbf without gamma.
    let out = run_with(
        &base,
        &[
            "train", "--lambda", "0.1", "--bias", "0.0", "--check-every", "1",
            "--kernel", "rbf", "--output", model.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);

    // Projection is a primal-solver flag.
    let out = run_with(
        &base,
        &[
            "train", "--lambda", "0.1", "--bias", "0.0", "--check-every", "1",
            "--kernel", "linear", "--projection", "--output", model.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);

    // Missing required flag: clap's own usage error.
    let out = run_with(&base, &["train", "--lambda", "0.1", "--bias", "0.0"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn train_input_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let model = dir.path().join("m.json");

    // Missing target column: exit 2.
    let out = run(&[
        "train", "--data", data.to_str().unwrap(), "--target-col", "nope",
        "--positive-label", "yes", "--lambda", "0.1", "--bias", "0.0",
        "--check-every", "1", "--output", model.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);

    // Single-class data: runtime degeneracy, exit 3.
    let single = dir.path().join("single.csv");
    std::fs::write(&single, "f1,class\n1.0,no\n2.0,no\n").unwrap();
    let out = run(&[
        "train", "--data", single.to_str().unwrap(), "--target-col", "class",
        "--positive-label", "yes", "--lambda", "0.1", "--bias", "0.0",
        "--check-every", "1", "--output", model.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn kernel_train_and_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let model = dir.path().join("k.json");

    let out = run_with(
        &base,
        &[
            "train", "--lambda", "0.5", "--bias", "0.0", "--check-every", "10",
            "--iterations", "150", "--kernel", "rbf", "--gamma", "0.5",
            "--seed", "3", "--output", model.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let train_auc = stdout(&out)
        .lines()
        .find_map(|l| l.strip_prefix("training AUC: ").map(str::to_string))
        .unwrap();

    // Scoring the saved model on its own training data reproduces the
    // training AUC.
    let out = run(&[
        "evaluate", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        stdout(&out).lines().next().unwrap(),
        format!("test AUC: {train_auc}")
    );
}

#[test]
fn evaluate_flag_and_dimension_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let model = dir.path().join("m.json");
    let out = run_with(
        &base,
        &[
            "train", "--lambda", "0.1", "--bias", "0.0", "--check-every", "5",
            "--iterations", "100", "--seed", "1", "--output", model.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0);

    // Neither --model nor --holdout.
    let out = run(&["evaluate", "--data", data.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);

    // Both --model and --holdout.
    let out = run(&[
        "evaluate", "--model", model.to_str().unwrap(), "--data", data.to_str().unwrap(),
        "--holdout", "0.2",
    ]);
    assert_eq!(exit_code(&out), 2);

    // Wrong feature dimension: exit 2.
    let wide = dir.path().join("wide.csv");
    std::fs::write(&wide, "f1,f2,f3,class\n1,2,3,yes\n4,5,6,no\n").unwrap();
    let out = run(&[
        "evaluate", "--model", model.to_str().unwrap(), "--data", wide.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);

    // Single-class test data: exit 3.
    let single = dir.path().join("single.csv");
    std::fs::write(&single, "f1,f2,class\n1.0,1.0,no\n2.0,2.0,no\n").unwrap();
    let out = run(&[
        "evaluate", "--model", model.to_str().unwrap(), "--data", single.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn evaluate_holdout_with_roc_output() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let roc = dir.path().join("roc.csv");
    let out = run_with(
        &base,
        &[
            "evaluate", "--holdout", "0.25", "--lambda", "0.05", "--bias", "0.0",
            "--check-every", "10", "--iterations", "200", "--seed", "5",
            "--roc-out", roc.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).starts_with("test AUC: "));
    let roc_text = std::fs::read_to_string(&roc).unwrap();
    let mut lines = roc_text.lines();
    assert_eq!(lines.next(), Some("fpr,tpr"));
    assert_eq!(lines.next(), Some("0,0"));
    assert_eq!(roc_text.lines().last(), Some("1,1"));
}

#[test]
fn cv_outputs_expected_shape_and_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let scores = dir.path().join("scores.csv");
    let summary = dir.path().join("summary.csv");
    let out = run_with(
        &base,
        &[
            "cv", "--folds", "2", "--lambda-grid", "0.01,0.1",
            "--bias-grid", "linspace:-2:2:10", "--iterations", "80", "--seed", "11",
            "--out", scores.to_str().unwrap(), "--summary-out", summary.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).lines().last().unwrap().starts_with("best: lambda="));

    let scores_text = std::fs::read_to_string(&scores).unwrap();
    let lines: Vec<&str> = scores_text.lines().collect();
    assert_eq!(lines[0], "lambda,bias,stop_x,fold,auc");
    // 2 lambdas × 10 biases × 2 folds.
    assert_eq!(lines.len() - 1, 40);

    let summary_text = std::fs::read_to_string(&summary).unwrap();
    let summary_lines: Vec<&str> = summary_text.lines().collect();
    assert_eq!(summary_lines[0], "lambda,bias,stop_x,mean_auc");
    assert_eq!(summary_lines.len() - 1, 20);
    // The ten-point bias grid contains 1.1111 and -0.2222 (4 d.p.).
    let biases: Vec<f64> = summary_lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(biases.iter().any(|b| (b - 1.1111).abs() < 5e-5), "{biases:?}");
    assert!(biases.iter().any(|b| (b + 0.2222).abs() < 5e-5), "{biases:?}");
}

#[test]
fn cv_rejects_single_fold() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let out = run_with(
        &base,
        &[
            "cv", "--folds", "1", "--lambda-grid", "0.1", "--bias-grid",
            "linspace:0:0:1", "--iterations", "50",
            "--out", dir.path().join("s.csv").to_str().unwrap(),
            "--summary-out", dir.path().join("m.csv").to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn cv_rejects_malformed_bias_grid() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    for bad in ["linspace:-2:2", "range:-2:2:10", "linspace:a:2:10", "linspace:-2:2:0"] {
        let out = run_with(
            &base,
            &[
                "cv", "--folds", "2", "--lambda-grid", "0.1", "--bias-grid", bad,
                "--out", dir.path().join("s.csv").to_str().unwrap(),
                "--summary-out", dir.path().join("m.csv").to_str().unwrap(),
            ],
        );
        assert_eq!(exit_code(&out), 2, "accepted {bad}");
    }
}

#[test]
fn curves_cardinality_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let base = data_flags(&data);
    let out_path = dir.path().join("lc.csv");

    let out = run_with(
        &base,
        &[
            "curves", "--type", "learning", "--proportions", "0.5,1.0",
            "--lambda", "0.1", "--bias", "0.0", "--check-every", "5", "--folds", "2",
            "--iterations", "60", "--seed", "2", "--out", out_path.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "proportion_or_value,fold,train_auc,cv_auc");
    assert_eq!(lines.len() - 1, 4); // 2 proportions × 2 folds

    // Validation curve over three bias values.
    let out = run_with(
        &base,
        &[
            "curves", "--type", "validation", "--vary", "bias", "--values", "-1,0,1",
            "--lambda", "0.1", "--check-every", "5", "--folds", "2",
            "--iterations", "60", "--seed", "2", "--out", out_path.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(text.lines().count() - 1, 6); // 3 values × 2 folds

    // A proportion that leaves a class below k: runtime error, exit 3.
    let out = run_with(
        &base,
        &[
            "curves", "--type", "learning", "--proportions", "0.1",
            "--lambda", "0.1", "--bias", "0.0", "--check-every", "5", "--folds", "3",
            "--iterations", "60", "--out", out_path.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 3);

    // Validation curve without --vary.
    let out = run_with(
        &base,
        &[
            "curves", "--type", "validation", "--values", "1,2", "--lambda", "0.1",
            "--check-every", "5", "--out", out_path.to_str().unwrap(),
        ],
    );
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn estimate_stop_reports_and_modes() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_noisy_dataset(dir.path());
    let base = data_flags(&data);

    let verbatim = run_with(
        &base,
        &[
            "estimate-stop", "--lambda", "0.1", "--bias", "0.0",
            "--iterations", "200", "--seed", "9",
        ],
    );
    assert_eq!(exit_code(&verbatim), 0, "{}", String::from_utf8_lossy(&verbatim.stderr));
    let text = stdout(&verbatim);
    for field in ["n: ", "p_hat: ", "bias_corrected: ", "mleb_variance: ", "ci: ", "x_selected: "] {
        assert!(text.contains(field), "missing {field} in {text}");
    }

    let standard = run_with(
        &base,
        &[
            "estimate-stop", "--lambda", "0.1", "--bias", "0.0",
            "--iterations", "200", "--seed", "9", "--mode", "standard",
        ],
    );
    assert_eq!(exit_code(&standard), 0);
    let line = |out: &str, prefix: &str| -> String {
        out.lines().find(|l| l.starts_with(prefix)).unwrap().to_string()
    };
    // Identical p̂, different interval centers.
    assert_eq!(line(&text, "p_hat:"), line(&stdout(&standard), "p_hat:"));
    assert_ne!(line(&text, "ci:"), line(&stdout(&standard), "ci:"));
}

#[test]
fn estimate_stop_errors_on_improvement_free_probe() {
    let dir = tempfile::tempdir().unwrap();
    // Constant features: every score equal, the AUC never leaves 0.5.
    let flat = dir.path().join("flat.csv");
    std::fs::write(&flat, "f1,class\n1.0,yes\n1.0,yes\n1.0,no\n1.0,no\n").unwrap();
    let out = run(&[
        "estimate-stop", "--data", flat.to_str().unwrap(), "--target-col", "class",
        "--positive-label", "yes", "--lambda", "0.1", "--bias", "0.0",
        "--iterations", "50",
    ]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_dataset(dir.path());
    let model_env = dir.path().join("env.json");
    let model_flag = dir.path().join("flag.json");

    let out = Command::new(binary())
        .args([
            "train", "--data", data.to_str().unwrap(), "--target-col", "class",
            "--positive-label", "yes", "--lambda", "0.1", "--bias", "0.0",
            "--check-every", "5", "--iterations", "100",
            "--output", model_env.to_str().unwrap(),
        ])
        .env("PEGASOS_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0);

    let out = run(&[
        "train", "--data", data.to_str().unwrap(), "--target-col", "class",
        "--positive-label", "yes", "--lambda", "0.1", "--bias", "0.0",
        "--check-every", "5", "--iterations", "100", "--seed", "42",
        "--output", model_flag.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(
        model_json_without_timestamp(&model_env),
        model_json_without_timestamp(&model_flag)
    );

    // Malformed environment seed is an input error.
    let out = Command::new(binary())
        .args([
            "train", "--data", data.to_str().unwrap(), "--target-col", "class",
            "--positive-label", "yes", "--lambda", "0.1", "--bias", "0.0",
            "--check-every", "5", "--output", model_env.to_str().unwrap(),
        ])
        .env("PEGASOS_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 2);
}
