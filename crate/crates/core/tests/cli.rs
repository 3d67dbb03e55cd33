use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_serendipity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn dims_csv_rows() {
    let text = stdout(&["dims", "--max-n", "2", "--max-r", "4", "--format", "csv"]);
    let rows: Vec<&str> = text.lines().filter(|l| l.starts_with("2,")).collect();
    assert_eq!(rows, ["2,1,4,4", "2,2,8,8", "2,3,12,12", "2,4,17,17"]);
}

#[test]
fn cmk_text_table() {
    let text = stdout(&["cmk", "--n", "4", "--format", "text"]);
    let row = text
        .lines()
        .find(|l| l.trim_start().starts_with("3 |"))
        .unwrap();
    let values: Vec<i64> = row
        .split('|')
        .nth(1)
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values, [1, 0, -3, 0, 3, 0, -1]);
}

#[test]
fn coeffs_json() {
    let doc: Value = serde_json::from_str(&stdout(&[
        "coeffs", "--n", "2", "--r", "5", "--format", "json",
    ]))
    .unwrap();
    let entries = doc["coefficients"].as_array().unwrap();
    assert_eq!(entries.len(), 7);
    let sum: i64 = entries.iter().map(|e| e["c"].as_i64().unwrap()).sum();
    assert_eq!(sum, 1);

    let doc: Value = serde_json::from_str(&stdout(&[
        "coeffs", "--n", "3", "--r", "4", "--format", "json",
    ]))
    .unwrap();
    let support: Vec<(Vec<u64>, i64)> = doc["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| {
            let a = e["alpha"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_u64().unwrap())
                .collect();
            (a, e["c"].as_i64().unwrap())
        })
        .collect();
    // q122 + q114 - 2 q112 + q111
    assert_eq!(support.len(), 3 + 3 + 3 + 1);
    for (a, c) in support {
        let mut sorted = a.clone();
        sorted.sort_unstable();
        let expected = match sorted.as_slice() {
            [1, 2, 2] | [1, 1, 4] | [1, 1, 1] => 1,
            [1, 1, 2] => -2,
            other => panic!("unexpected {other:?}"),
        };
        assert_eq!(c, expected, "{a:?}");
    }
}

#[test]
fn nodes_csv_row_count() {
    let text = stdout(&["nodes", "--n", "2", "--r", "5", "--scheme", "uniform"]);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "alpha_1,alpha_2,x_1,x_2,rho_1,rho_2");
    assert_eq!(lines.count(), 23);
}

#[test]
fn verify_passes_for_hermite() {
    let out = run(&["verify", "--n", "2", "--r", "5", "--scheme", "hermite"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn basis_then_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("basis.json");
    let points = dir.path().join("points.csv");
    let values = dir.path().join("values.csv");
    stdout(&[
        "basis",
        "--n",
        "2",
        "--r",
        "3",
        "--scheme",
        "symmetric",
        "--out",
        basis.to_str().unwrap(),
    ]);
    fs::write(
        &points,
        "# nodes and one interior point\nx_1,x_2\n-1,-1\n1,1\n0.25,-0.5\n",
    )
    .unwrap();
    stdout(&[
        "eval",
        basis.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
        "--out",
        values.to_str().unwrap(),
    ]);

    let doc: Value = serde_json::from_str(&fs::read_to_string(&basis).unwrap()).unwrap();
    assert_eq!(doc["functions"].as_array().unwrap().len(), 12);

    let mut reader = csv::Reader::from_path(&values).unwrap();
    let mut sum_at_interior = 0.0;
    for record in reader.records() {
        let record = record.unwrap();
        let f: Vec<f64> = record.iter().map(|v| v.parse().unwrap()).collect();
        let (x, alpha, value) = ((f[0], f[1]), (f[2], f[3]), f[4]);
        if x == (-1.0, -1.0) {
            let want = if alpha == (0.0, 0.0) { 1.0 } else { 0.0 };
            assert!((value - want).abs() < 1e-12, "{alpha:?} at {x:?}: {value}");
        }
        if x == (1.0, 1.0) {
            let want = if alpha == (1.0, 1.0) { 1.0 } else { 0.0 };
            assert!((value - want).abs() < 1e-12, "{alpha:?} at {x:?}: {value}");
        }
        if x == (0.25, -0.5) {
            sum_at_interior += value;
        }
    }
    assert!((sum_at_interior - 1.0).abs() < 1e-12);
}

#[test]
fn custom_scheme_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.json");
    fs::write(&path, r#"[["1/3", "-1/3"]]"#).unwrap();
    let scheme = format!("custom:{}", path.display());
    let out = run(&["verify", "--n", "2", "--r", "3", "--scheme", &scheme]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    fs::write(&path, r#"[[0.5, -0.5]]"#).unwrap();
    let out = run(&["verify", "--n", "2", "--r", "3", "--scheme", &scheme]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(
        run(&["nodes", "--n", "2", "--r", "3", "--scheme", "chebyshev"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["coeffs", "--n", "0", "--r", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["coeffs", "--n", "2", "--r", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["coeffs", "--n", "12", "--r", "3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["coeffs", "--n", "12", "--r", "2", "--max-n", "12"])
            .status
            .code(),
        Some(0)
    );
}
