use std::path::PathBuf;
use std::process::{Command, Output};

fn dppkm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dppkm")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn synth_is_deterministic() {
    let args = ["synth", "--grids", "2", "--runs", "1", "--methods", "dppk", "--seed", "7"];
    let a = dppkm(&args);
    let b = dppkm(&args);
    assert_eq!(stdout(&a), stdout(&b));
    let text = stdout(&a);
    assert!(text.starts_with("# dppkm "));
    assert!(text.contains("# master_seed=7"));
    assert!(text.contains("# sigma_rule=separation"));
}

#[test]
fn job_count_does_not_change_output() {
    let base = ["synth", "--grids", "2,3", "--points", "30", "--runs", "6", "--seed", "3"];
    let one = dppkm(&[&base[..], &["--jobs", "1"]].concat());
    let four = dppkm(&[&base[..], &["--jobs", "4"]].concat());
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn file_and_stdout_match() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.tsv");
    let to_stdout = dppkm(&["verify", "--eps-grid", "50"]);
    let to_file = dppkm(&["verify", "--eps-grid", "50", "-o", path.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
}

#[test]
fn verify_precondition_is_a_usage_error() {
    let o = dppkm(&["verify", "--sigma", "1.0", "--bigd", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0.669"), "{err}");
}

#[test]
fn zero_k_is_a_usage_error() {
    let o = dppkm(&["sample", "--data", &data("iris.data"), "--label-col", "4", "--mode", "kdpp", "--k", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = dppkm(&["sample", "--data", &data("iris.data"), "--label-col", "4", "--mode", "sequential"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unknown_flags_and_values_are_rejected() {
    assert_eq!(dppkm(&["synth", "--bogus"]).status.code(), Some(2));
    assert_eq!(dppkm(&["synth", "--methods", "dpp,magic"]).status.code(), Some(2));
    assert_eq!(dppkm(&["bench", "--data", "x", "--sigma", "-1"]).status.code(), Some(2));
    assert_eq!(dppkm(&["synth", "--runs", "0"]).status.code(), Some(2));
}

#[test]
fn missing_file_is_a_runtime_error() {
    let o = dppkm(&["bench", "--data", "/definitely/not/here.csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_prints_the_drawn_indices() {
    let text = stdout(&dppkm(&[
        "sample", "--data", &data("iris.data"), "--label-col", "4", "--mode", "kdpp", "--k", "3", "--seed", "5",
    ]));
    assert!(text.contains("# size = 3"));
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "position\tindex");
    assert_eq!(rows.len(), 4);
}

#[test]
fn bench_reports_every_method() {
    let text = stdout(&dppkm(&["bench", "--data", &data("iris.data"), "--label-col", "4", "--runs", "3", "--jobs", "2"]));
    for m in ["\tpp\t", "\tdpp\t", "\tdppk\t"] {
        assert!(text.contains(m), "{m} missing:\n{text}");
    }
    assert!(text.contains("# k=3"));
}

#[test]
fn screenplay_with_and_without_gold() {
    let with = stdout(&dppkm(&[
        "screenplay",
        "--input",
        &data("two_locations.txt"),
        "--gold",
        &data("two_locations.gold.tsv"),
        "--runs",
        "5",
    ]));
    let row = with.lines().find(|l| l.starts_with("two_locations\t")).unwrap();
    assert!(row.ends_with("1.000000\t0.000000"), "{row}");

    let without = stdout(&dppkm(&["screenplay", "--input", &data("identical_headings.txt"), "--runs", "5"]));
    assert!(without.contains("F1 rows omitted"));

    let mismatched = dppkm(&[
        "screenplay",
        "--input",
        &data("two_locations.txt"),
        "--input",
        &data("identical_headings.txt"),
        "--gold",
        &data("two_locations.gold.tsv"),
    ]);
    assert_eq!(mismatched.status.code(), Some(2));
}

#[test]
fn dpp_diag_reports_expected_size() {
    let text = stdout(&dppkm(&["dpp-diag", "--data", &data("iris.data"), "--label-col", "4"]));
    assert!(text.contains("# expected_size = "));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 151);
}
