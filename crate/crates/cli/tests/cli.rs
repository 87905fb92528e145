//! Black-box tests of the command-line surface: exit codes, flag
//! validation, and the report invariants.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_lierec");

struct TempDir(PathBuf);

impl TempDir {
    fn new(name: &str) -> Self {
        let path = std::env::temp_dir().join(format!("lierec_cli_{}_{name}", std::process::id()));
        fs::create_dir_all(&path).unwrap();
        TempDir(path)
    }

    fn path(&self) -> &Path {
        &self.0
    }

    fn file(&self, name: &str) -> String {
        self.0.join(name).display().to_string()
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN)
        .args(args)
        .env_remove("LIEREC_SEED")
        .output()
        .expect("binary runs")
}

fn assert_exit(args: &[&str], code: i32) -> std::process::Output {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "args {args:?}: stdout {} stderr {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn zero_dt_is_a_usage_error() {
    let dir = TempDir::new("zero_dt");
    let out = assert_exit(
        &["gen", "--group", "so3", "--n", "10", "--dt", "0", "--out", &dir.file("x.ljd")],
        1,
    );
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_group_is_a_usage_error() {
    let dir = TempDir::new("bad_group");
    assert_exit(
        &["gen", "--group", "su2", "--n", "1", "--out", &dir.file("x.ljd")],
        1,
    );
}

#[test]
fn missing_subcommand_is_a_usage_error_and_help_succeeds() {
    assert_exit(&[], 1);
    assert_exit(&["--help"], 0);
    assert_exit(&["gen", "--help"], 0);
}

#[test]
fn failure_diagnostics_are_single_line() {
    let dir = TempDir::new("diag");
    let out = assert_exit(
        &["eval", "--model", &dir.file("missing.lem"), "--data", &dir.file("missing.ljd"), "--out", &dir.file("r.csv")],
        2,
    );
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.trim_end().lines().count(), 1, "stderr: {stderr}");
}

#[test]
fn empty_dataset_generation_warns_but_succeeds() {
    let dir = TempDir::new("empty");
    let out = assert_exit(
        &["gen", "--group", "se2", "--n", "0", "--out", &dir.file("empty.ljd")],
        0,
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(fs::metadata(dir.path().join("empty.ljd")).unwrap().len() > 0);
}

#[test]
fn corrupt_dataset_is_a_data_error() {
    let dir = TempDir::new("corrupt");
    fs::write(dir.path().join("bad.ljd"), "not json\n").unwrap();
    assert_exit(
        &["train", "--data", &dir.file("bad.ljd"), "--out", &dir.file("m.lem")],
        2,
    );
}

#[test]
fn kind_mismatch_between_model_and_data_is_a_data_error() {
    let dir = TempDir::new("mismatch");
    let se2 = dir.file("se2.ljd");
    let so3 = dir.file("so3.ljd");
    let model = dir.file("model.lem");
    assert_exit(&["gen", "--group", "se2", "--n", "40", "--out", &se2], 0);
    assert_exit(&["gen", "--group", "so3", "--n", "40", "--out", &so3], 0);
    assert_exit(
        &["train", "--data", &se2, "--out", &model, "--epochs", "1", "--hidden", "8,8"],
        0,
    );
    assert_exit(&["eval", "--model", &model, "--data", &so3, "--out", &dir.file("r.csv")], 2);
}

#[test]
fn zero_epochs_writes_an_initialized_model_with_warning() {
    let dir = TempDir::new("zero_epochs");
    let data = dir.file("d.ljd");
    let model = dir.file("m.lem");
    assert_exit(&["gen", "--group", "sl2r", "--n", "30", "--out", &data], 0);
    let out = assert_exit(
        &["train", "--data", &data, "--out", &model, "--epochs", "0", "--hidden", "8,8"],
        0,
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(fs::metadata(dir.path().join("m.lem")).is_ok());
    // loss curve exists and holds only the header
    let loss = fs::read_to_string(dir.path().join("m.loss.csv")).unwrap();
    assert_eq!(loss.trim_end(), "epoch,train_loss,val_loss");
}

#[test]
fn seed_falls_back_to_the_environment_variable() {
    let dir = TempDir::new("env_seed");
    let flagged = dir.file("flagged.ljd");
    let env_based = dir.file("env.ljd");
    assert_exit(
        &["gen", "--group", "so3", "--n", "12", "--seed", "321", "--out", &flagged],
        0,
    );
    let out = Command::new(BIN)
        .args(["gen", "--group", "so3", "--n", "12", "--out", &env_based])
        .env("LIEREC_SEED", "321")
        .output()
        .unwrap();
    assert!(out.status.success());
    let a = fs::read(dir.path().join("flagged.ljd")).unwrap();
    let b = fs::read(dir.path().join("env.ljd")).unwrap();
    // identical bytes except the command's own summary output
    assert_eq!(a, b);
}

#[test]
fn eval_on_clean_data_never_beats_the_oracle() {
    let dir = TempDir::new("oracle_bound");
    let data = dir.file("d.ljd");
    let model = dir.file("m.lem");
    let report = dir.file("r.csv");
    assert_exit(&["gen", "--group", "se2", "--n", "120", "--seed", "3", "--out", &data], 0);
    assert_exit(
        &["train", "--data", &data, "--out", &model, "--epochs", "4", "--hidden", "16,16"],
        0,
    );
    assert_exit(&["eval", "--model", &model, "--data", &data, "--out", &report], 0);

    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let mlp_col = header.iter().position(|h| *h == "euclid_err_mlp").unwrap();
    let base_col = header.iter().position(|h| *h == "euclid_err_baseline").unwrap();
    let mut checked = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        // skip the mean/max summary rows
        if fields[0].parse::<usize>().is_err() || fields[mlp_col].is_empty() {
            continue;
        }
        let mlp: f64 = fields[mlp_col].parse().unwrap();
        let base: f64 = fields[base_col].parse().unwrap();
        assert!(base <= mlp, "baseline must beat or tie the mlp on clean data");
        assert!(base < 1e-8, "baseline error {base} should be rounding noise");
        checked += 1;
    }
    assert_eq!(checked, 120);
}

#[test]
fn sl2r_eval_reports_regime_columns() {
    let dir = TempDir::new("regime_cols");
    let data = dir.file("d.ljd");
    let model = dir.file("m.lem");
    let report = dir.file("r.csv");
    assert_exit(&["gen", "--group", "sl2r", "--n", "30", "--seed", "5", "--out", &data], 0);
    assert_exit(
        &["train", "--data", &data, "--out", &model, "--epochs", "2", "--hidden", "8,8"],
        0,
    );
    let out = assert_exit(&["eval", "--model", &model, "--data", &data, "--out", &report], 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("regime match rate"));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    for col in ["regime_true", "regime_pred", "regime_match"] {
        assert!(header.contains(col), "missing column {col}");
    }
}

#[test]
fn plot_with_unknown_kind_is_a_usage_error() {
    let dir = TempDir::new("plot_kind");
    assert_exit(&["plot", "--kind", "pie", "--out", &dir.file("p.svg")], 1);
    // loss without --report is usage too
    assert_exit(&["plot", "--kind", "loss", "--out", &dir.file("p.svg")], 1);
}
