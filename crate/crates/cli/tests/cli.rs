use std::process::{Command, Output};

fn schrodg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schrodg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn conv_h_prints_csv_with_fixed_header() {
    let o = schrodg(&["conv-h", "--levels", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "level,h_x,h_t,n_dofs,dg_error,rate,cond2");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,1e-1,1e-1,300,"));
    assert!(lines[2].starts_with("1,5e-2,5e-2,1200,"));
    let rate: f64 = lines[2].split(',').nth(5).unwrap().parse().unwrap();
    assert!(rate > 0.7);
}

#[test]
fn output_is_deterministic() {
    let args = ["conv-h", "--levels", "2", "--p", "2", "--space", "planewave"];
    assert_eq!(schrodg(&args).stdout, schrodg(&args).stdout);
}

#[test]
fn constant_data_leaves_rates_empty() {
    let o = schrodg(&["conv-h", "--levels", "2", "--constant-data"]);
    assert_eq!(o.status.code(), Some(0));
    for row in stdout(&o).lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        assert!(cols[4].parse::<f64>().unwrap() <= 1e-12);
        assert_eq!(cols[5], "");
    }
}

#[test]
fn out_directory_receives_tables_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = schrodg(&["conditioning", "--levels", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    for name in ["conditioning_a.csv", "conditioning_b.csv"] {
        let csv = std::fs::read_to_string(out.join(name)).unwrap();
        assert!(csv.starts_with("level,h_x,h_t,n_dofs,dg_error,rate,cond2\n"));
        assert_eq!(csv.lines().count(), 3);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["experiment"], "conditioning");
}

#[test]
fn verify_basis_reports_dimensions() {
    for (d, dim) in [("1", 3), ("2", 6), ("3", 10)] {
        let o = schrodg(&["verify-basis", "--p", "1", "--dim", d]);
        assert_eq!(o.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        let entries = v["report"]["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 2);
        let entry = &entries[1];
        assert_eq!(entry["p"], 1);
        assert_eq!(entry["dim"], dim);
        assert_eq!(entry["expected_dim"], dim);
        assert_eq!(entry["passed"], true);
        assert_eq!(entry["basis"].as_array().unwrap().len(), dim);
    }
}

#[test]
fn bad_configurations_exit_with_code_3() {
    for args in [
        &["conv-h", "--levels", "1"][..],
        &["conv-h", "--levels", "0"],
        &["conv-p", "--p", "0"],
        &["conv-h", "--space", "planewave", "--p", "0"],
        &["verify-basis", "--dim", "4"],
        &["conv-h", "--quad-n", "0"],
        &["no-such-experiment"],
        &["conv-h", "--space", "bogus"],
    ] {
        let o = schrodg(args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_and_version_exit_cleanly() {
    for flag in ["--help", "--version"] {
        let o = schrodg(&[flag]);
        assert_eq!(o.status.code(), Some(0));
        assert!(!o.stdout.is_empty());
    }
}

#[test]
fn global_oracle_matches_marching() {
    let base = ["conv-h", "--levels", "2", "--p", "2"];
    let a = stdout(&schrodg(&base));
    let b = stdout(&schrodg(&[&base[..], &["--global-oracle"]].concat()));
    let err = |s: &str| -> Vec<f64> { s.lines().skip(1).map(|l| l.split(',').nth(4).unwrap().parse().unwrap()).collect() };
    for (x, y) in err(&a).iter().zip(err(&b)) {
        assert!((x - y).abs() <= 1e-8 * y);
    }
}
