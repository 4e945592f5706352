use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use betti_cli::output::csv_data_lines;

fn betti(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betti"))
        .args(args)
        .env_remove("BETTI_WORKERS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    csv_data_lines(&text)
        .iter()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn curve_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b1.csv");
    let out = betti(&[
        "curve", "--manifold", "circle", "--complex", "vr", "--invariant", "betti1", "--n", "20", "--trials", "500",
        "--t-min", "0.01", "--t-max", "0.32", "--steps", "32", "--seed", "42", "--workers", "2", "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("# format: betti-curves/1\n# config: {"));
    assert_eq!(csv_data_lines(&text)[0], "t,n,trials,mean,variance,stderr,oracle_p");
    let rows = rows(&csv);
    assert_eq!(rows.len(), 32);
    for row in &rows {
        assert_eq!(row.len(), 7);
        let p: f64 = row[6].parse().expect("oracle column filled");
        assert!((0.0..=1.0).contains(&p));
    }
    let gp = fs::read_to_string(dir.path().join("b1.gp")).unwrap();
    assert!(gp.contains("set datafile separator \",\""));
    assert!(gp.contains("\"b1.csv\" using 1:7"));
}

#[test]
fn single_step_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one.csv");
    let out = betti(&[
        "curve", "--n", "20", "--trials", "100", "--t-min", "0.01", "--t-max", "0.32", "--steps", "1", "--workers",
        "1", "--output", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(rows(&csv).len(), 1);
}

#[test]
fn oracle_column_is_empty_past_a_third() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("wide.csv");
    let out = betti(&[
        "curve", "--manifold", "circle", "--complex", "vr", "--invariant", "betti1", "--n", "12", "--trials", "200",
        "--t-min", "0.05", "--t-max", "0.5", "--steps", "10", "--workers", "2", "--output", csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    for row in rows(&csv) {
        let t: f64 = row[0].parse().unwrap();
        assert_eq!(row[6].is_empty(), t >= 1.0 / 3.0, "t = {t}");
    }
}

#[test]
fn non_oracle_curves_leave_the_column_empty() {
    let out = betti(&[
        "curve", "--manifold", "sphere", "--invariant", "betti0", "--n", "10", "--trials", "50", "--t-min", "0.1",
        "--t-max", "0.2", "--steps", "2", "--workers", "1",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for line in &csv_data_lines(&text)[1..] {
        assert!(line.ends_with(','), "{line}");
    }
}

#[test]
fn oracle_subcommand() {
    let out = betti(&["oracle", "--n", "2", "--t-min", "0.05", "--t-max", "0.3", "--steps", "6"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines = csv_data_lines(&text);
    assert_eq!(lines[0], "r,n,p,expected_b1,variance_b1");
    assert_eq!(lines.len(), 7);
    assert!(lines[1..].iter().all(|l| l.split(',').nth(2) == Some("0")));

    let out = betti(&["oracle", "--n", "100", "--grid", "0.1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let p: f64 = csv_data_lines(&text)[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!(p >= 0.99);

    let out = betti(&["oracle", "--n", "10", "--grid", "0.1,0.4"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("0.4"));
}

#[test]
fn json_mirrors_the_columns() {
    let out = betti(&[
        "curve", "--n", "8", "--trials", "100", "--grid", "0.1,0.2,0.4", "--workers", "1", "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["format_version"], "betti-curves/1");
    assert_eq!(v["columns"]["t"].as_array().unwrap().len(), 3);
    assert!(v["columns"]["oracle_p"][2].is_null());
    assert_eq!(v["config"]["n"], 8);
}

#[test]
fn rerun_reproduces_numeric_columns() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let out = betti(&[
        "curve", "--manifold", "torus", "--invariant", "euler", "--n", "9", "--trials", "300", "--t-min", "0.05",
        "--t-max", "0.4", "--steps", "8", "--seed", "7", "--workers", "3", "--output", first.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = betti(&["rerun", "--config", first.to_str().unwrap(), "--output", second.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let a = fs::read_to_string(&first).unwrap();
    let b = fs::read_to_string(&second).unwrap();
    assert_eq!(csv_data_lines(&a), csv_data_lines(&b));

    let json = dir.path().join("conv.json");
    let out = betti(&[
        "converge", "--t", "0.1", "--n-values", "10,25", "--trials", "200", "--workers", "2", "--format", "json",
        "--output", json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = betti(&["rerun", "--config", json.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let original: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let again: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(original["columns"], again["columns"]);
}

#[test]
fn converge_table() {
    let out = betti(&[
        "converge", "--manifold", "circle", "--invariant", "betti1", "--t", "0.1", "--n-values", "10,25,50",
        "--trials", "400", "--workers", "2",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines = csv_data_lines(&text);
    assert_eq!(lines[0], "n,t,trials,mean,variance,stderr,abs_error,target");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("10,0.1,400,0,0,0,1,1"));
}

#[test]
fn exit_codes() {
    let out = betti(&["selftest", "--workers", "2"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), 3);

    assert_eq!(code(&betti(&["selftest", "--trials", "50"])), 2);
    assert_eq!(code(&betti(&["curve", "--n", "5", "--t-min", "0.3", "--t-max", "0.1", "--steps", "3"])), 2);
    assert_eq!(code(&betti(&["curve", "--n", "5", "--t-min", "0.1", "--complex", "cech", "--manifold", "sphere"])), 2);
    assert_eq!(code(&betti(&["curve", "--n", "5", "--t-min", "0.1", "--workers", "0"])), 2);
    let out = betti(&["curve", "--n", "60", "--t-min", "0.5", "--budget", "1000", "--trials", "4", "--workers", "1"]);
    assert_eq!(code(&out), 3);
    let missing = betti(&["rerun", "--config", "/nonexistent/file.csv"]);
    assert_eq!(code(&missing), 2);
}

#[test]
fn workers_come_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_betti"))
        .args(["curve", "--n", "5", "--trials", "20", "--t-min", "0.1"])
        .env("BETTI_WORKERS", "3")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"workers\":3"));
    let out = Command::new(env!("CARGO_BIN_EXE_betti"))
        .args(["curve", "--n", "5", "--trials", "20", "--t-min", "0.1", "--workers", "2"])
        .env("BETTI_WORKERS", "3")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"workers\":2"));
}
