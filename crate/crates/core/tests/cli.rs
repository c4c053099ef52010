use std::process::{Command, Output};

fn ontic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Parses a CSV body into rows of fields, skipping the header.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn max_delta(csv: &str, two_m_b2: &str) -> f64 {
    rows(csv)
        .iter()
        .filter(|r| r[1] == two_m_b2)
        .map(|r| r[4].parse::<f64>().unwrap())
        .fold(0.0, f64::max)
}

#[test]
fn compare_sg_golden() {
    let o = ontic(&[
        "compare-sg",
        "--n",
        "6",
        "--two-j",
        "2",
        "--two-ma",
        "2",
        "--grid",
        "6,0,1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "\
theta_over_pi,two_m_b2,p_model,p_qm,abs_delta
0/6,-2,0,0,0
0/6,0,0,0,0
0/6,2,1,1,0
1/6,-2,0,0.00448729810778,0.00448729810778
1/6,0,0.2,0.125,0.075
1/6,2,0.8,0.870512701892,0.0705127018922
6/6,-2,1,1,0
6/6,0,0,0,0
6/6,2,0,0,0
";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn compare_sg_is_deterministic() {
    let args = ["compare-sg", "--n", "100", "--two-j", "2", "--two-ma", "0"];
    let a = ontic(&args);
    let b = ontic(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let body = stdout(&a);
    assert_eq!(body.lines().count(), 1 + 101 * 3);
    let thetas: Vec<String> = rows(&body).iter().map(|r| r[0].clone()).collect();
    assert_eq!(thetas[0], "0/100");
    assert_eq!(thetas[thetas.len() - 1], "100/100");
}

#[test]
fn spin_half_sweep_and_tuning() {
    let base = ["compare-sg", "--n", "100", "--two-j", "1", "--two-ma", "1"];
    let sum_all = stdout(&ontic(&base));
    let mid = rows(&sum_all)
        .into_iter()
        .find(|r| r[0] == "50/100" && r[1] == "1")
        .unwrap();
    let p_model: f64 = mid[2].parse().unwrap();
    assert!((p_model - 0.5).abs() <= 0.08);
    assert_eq!(mid[3], "0.5");
    let first = rows(&sum_all)
        .into_iter()
        .find(|r| r[0] == "0/100" && r[1] == "1")
        .unwrap();
    assert_eq!(first[2], "1");

    let mut tuned_args = base.to_vec();
    tuned_args.extend(["--fix-two-la", "paper-tuned"]);
    let tuned = stdout(&ontic(&tuned_args));
    let mut fixed_args = base.to_vec();
    fixed_args.extend(["--fix-two-la", "-49"]);
    let fixed = stdout(&ontic(&fixed_args));
    assert!(max_delta(&tuned, "1") < max_delta(&sum_all, "1"));
    assert_eq!(tuned, fixed);
}

#[test]
fn compare_bs_near_tau_point_four() {
    let o = ontic(&[
        "compare-bs",
        "--n",
        "100",
        "--ca",
        "2",
        "--da",
        "0",
        "--tau",
        "0.4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    assert!(body.starts_with("tau,c_b2,d_b2,p_model,p_qm,abs_delta\n"));
    let r = rows(&body);
    assert_eq!(r.len(), 3);
    let delta = |c: &str| -> f64 {
        r.iter().find(|row| row[1] == c).unwrap()[5]
            .parse()
            .unwrap()
    };
    assert!(delta("1") <= 0.02);
    assert!(delta("2") > delta("1"));
    for row in &r {
        let c: u32 = row[1].parse().unwrap();
        let d: u32 = row[2].parse().unwrap();
        assert_eq!(c + d, 2);
    }
}

#[test]
fn compare_bs_full_transmission() {
    let o = ontic(&[
        "compare-bs",
        "--n",
        "100",
        "--ca",
        "2",
        "--da",
        "0",
        "--grid",
        "0",
    ]);
    let r = rows(&stdout(&o));
    let nonzero: Vec<_> = r.iter().filter(|row| row[3] != "0").collect();
    assert_eq!(nonzero.len(), 1);
    assert_eq!(nonzero[0][0], "1");
    assert_eq!((nonzero[0][1].as_str(), nonzero[0][3].as_str()), ("2", "1"));
}

#[test]
fn compare_bs_rejects_off_grid_tau() {
    let o = ontic(&[
        "compare-bs",
        "--n",
        "2",
        "--ca",
        "1",
        "--da",
        "0",
        "--tau",
        "0.37",
        "--tau-tol",
        "1e-6",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no b_map grid point"));
}

#[test]
fn oracle_verify_small_n() {
    for n in ["1", "2", "4"] {
        let o = ontic(&["oracle-verify", "--n", n]);
        assert_eq!(o.status.code(), Some(0), "n={n}");
        for r in rows(&stdout(&o)) {
            assert_eq!(r[2], "0", "n={n} check {}", r[0]);
        }
    }
    let o = ontic(&["oracle-verify", "--n", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let spaces = v
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["check"] == "event_spaces")
        .unwrap();
    assert_eq!(spaces["failures"], 0);
}

#[test]
fn oracle_verify_guard() {
    assert_eq!(ontic(&["oracle-verify", "--n", "7"]).status.code(), Some(2));
    assert_eq!(ontic(&["oracle-verify", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn granularity_scan_examples() {
    let o = ontic(&[
        "granularity-scan",
        "--n",
        "6",
        "--two-j",
        "2",
        "--two-ma",
        "2",
        "--grid",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][1], "-2");
    assert_eq!(r[0][2], "0");
    assert!((r[0][3].parse::<f64>().unwrap() - 0.00449).abs() < 5e-4);

    let o = ontic(&[
        "granularity-scan",
        "--n",
        "60",
        "--two-j",
        "2",
        "--two-ma",
        "2",
        "--grid",
        "1",
    ]);
    let r = rows(&stdout(&o));
    assert_eq!(r.len(), 1);
    assert!((r[0][3].parse::<f64>().unwrap() - 4.7e-7).abs() < 1e-7);

    let o = ontic(&[
        "granularity-scan",
        "--n",
        "6",
        "--ca",
        "2",
        "--da",
        "0",
        "--grid",
        "1",
    ]);
    let body = stdout(&o);
    assert!(body.starts_with("tau,c_b2,d_b2,p_model,p_qm\n"));
    let r = rows(&body);
    assert_eq!((r[0][1].as_str(), r[0][2].as_str()), ("0", "2"));
}

#[test]
fn json_mirrors_csv_columns() {
    let o = ontic(&[
        "compare-sg",
        "--n",
        "4",
        "--two-j",
        "1",
        "--two-ma",
        "-1",
        "--grid",
        "2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    for row in arr {
        let keys: Vec<&str> = row
            .as_object()
            .unwrap()
            .keys()
            .map(String::as_str)
            .collect();
        assert_eq!(keys.len(), 5);
        for k in ["theta_over_pi", "two_m_b2", "p_model", "p_qm", "abs_delta"] {
            assert!(keys.contains(&k));
        }
        assert_eq!(row["theta_over_pi"], "2/4");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sg.csv");
    let o = ontic(&[
        "compare-sg",
        "--n",
        "2",
        "--two-j",
        "1",
        "--two-ma",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert_eq!(body.lines().count(), 1 + 3 * 2);
}

#[test]
fn invalid_specs_exit_two() {
    let cases: &[&[&str]] = &[
        &["compare-sg", "--n", "4", "--two-j", "2", "--two-ma", "1"],
        &["compare-sg", "--n", "4", "--two-j", "5", "--two-ma", "1"],
        &[
            "compare-sg",
            "--n",
            "4",
            "--two-j",
            "1",
            "--two-ma",
            "1",
            "--grid",
            "9",
        ],
        &[
            "compare-sg",
            "--n",
            "4",
            "--two-j",
            "1",
            "--two-ma",
            "1",
            "--mode",
            "loud",
        ],
        &[
            "compare-sg",
            "--n",
            "4",
            "--two-j",
            "1",
            "--two-ma",
            "1",
            "--fix-two-la",
            "2",
        ],
        &["compare-bs", "--n", "2", "--ca", "2", "--da", "1"],
        &["compare-sg", "--n", "4"],
        &["frobnicate"],
    ];
    for args in cases {
        assert_eq!(ontic(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let o = ontic(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("compare-sg"));
}
