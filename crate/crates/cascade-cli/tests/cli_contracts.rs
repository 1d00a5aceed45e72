//! End-to-end checks of the `cascade` binary: table shapes, formatting,
//! exit codes, and output determinism.

use std::collections::BTreeSet;
use std::process::{Command, Output};

fn cascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn csv_rows(out: &Output, expected_header: &str) -> Vec<Vec<String>> {
    assert!(out.status.success(), "exit code: {:?}", out.status.code());
    let text = stdout_str(out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(expected_header));
    lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn derive_prints_one_csv_row_with_derived_quantities() {
    let out = cascade(&["derive", "--p", "0.7", "--eps", "0.2", "--v", "B"]);
    let rows = csv_rows(&out, "p,eps,V,a,b,eta,alpha,p_f,r");
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row[0], "0.7");
    assert_eq!(row[2], "B");
    assert_eq!(row[3], "0.76");
    assert_eq!(row[5], "0.645043180114");
    assert_eq!(row[8], "1");
}

#[test]
fn derive_at_eps_zero_prints_eta_exactly_one() {
    let out = cascade(&["derive", "--p", "0.64", "--eps", "0", "--v", "G"]);
    let rows = csv_rows(&out, "p,eps,V,a,b,eta,alpha,p_f,r");
    assert_eq!(rows[0][5], "1");
    assert_eq!(rows[0][8], "1");
}

#[test]
fn invalid_inputs_exit_2_with_a_message() {
    let cases: &[&[&str]] = &[
        &["derive", "--p", "0.4", "--eps", "0.2", "--v", "B"],
        &["derive", "--p", "1.0", "--eps", "0.2", "--v", "B"],
        &["pycas", "--p", "0.7", "--eps", "1.0", "--v", "B"],
        &["pycas", "--p", "0.7", "--eps", "-0.1", "--v", "B"],
        &[
            "simulate", "--p", "0.7", "--eps", "0.2", "--v", "B", "--trials", "0",
        ],
        &["thresholds", "--p-grid", "0.9:0.5:0.1"],
        &["derive", "--p", "0.7", "--eps", "0.2", "--v", "X"],
        &["no-such-command"],
    ];
    for args in cases {
        let out = cascade(args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
        assert!(!out.stderr.is_empty(), "args: {args:?}");
        assert!(out.stdout.is_empty(), "args: {args:?}");
    }
}

#[test]
fn thresholds_rows_are_sorted_with_zero_first_threshold() {
    let out = cascade(&["thresholds", "--p-grid", "0.6:0.8:0.1", "--r-max", "5"]);
    let rows = csv_rows(&out, "p,r,eps_r");
    assert_eq!(rows.len(), 15);
    for chunk in rows.chunks(5) {
        assert_eq!(chunk[0][1], "1");
        assert_eq!(chunk[0][2], "0");
        let eps: Vec<f64> = chunk.iter().map(|r| r[2].parse().unwrap()).collect();
        for w in eps.windows(2) {
            assert!(w[0] < w[1]);
        }
    }
    let p_order: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    for w in p_order.windows(2) {
        assert!(w[0] <= w[1]);
    }
}

#[test]
fn pycas_value_matches_the_library_recursion() {
    let out = cascade(&[
        "pycas", "--p", "0.7", "--eps", "0.2", "--v", "B", "--stages", "10",
    ]);
    let rows = csv_rows(&out, "p,eps,V,M,p_ycas,err_bound,method");
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][3], "10");
    assert_eq!(rows[0][6], "Recursion");
    let value: f64 = rows[0][4].parse().unwrap();
    assert!((value - 0.259_802_996_416_317_1).abs() < 1e-12);

    let deep = cascade(&["pycas", "--p", "0.7", "--eps", "0.2", "--v", "B"]);
    let rows = csv_rows(&deep, "p,eps,V,M,p_ycas,err_bound,method");
    assert_eq!(rows[0][3], "40");
    let value: f64 = rows[0][4].parse().unwrap();
    assert!((value - 0.25980273028924084).abs() < 1e-12);
}

#[test]
fn pycas_inside_the_guard_band_reports_both_one_sided_values() {
    // eps_2(0.7) to 16 digits; the point sits inside the default band
    let out = cascade(&[
        "pycas",
        "--p",
        "0.7",
        "--eps",
        "0.3142500879690937",
        "--v",
        "B",
    ]);
    let rows = csv_rows(&out, "p,eps,V,M,p_ycas,err_bound,method");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][6], "ClosedFormThresholdMinus");
    assert_eq!(rows[1][6], "ClosedFormThresholdPlus");
    assert_eq!(rows[0][5], "0");
    let minus: f64 = rows[0][4].parse().unwrap();
    let plus: f64 = rows[1][4].parse().unwrap();
    assert!(minus > plus);
}

#[test]
fn widening_the_guard_band_snaps_nearby_points_to_the_pair() {
    // 0.31 is far from eps_2(0.7) at the default tol but inside 0.05 in 1/eta
    let narrow = cascade(&["pycas", "--p", "0.7", "--eps", "0.31", "--v", "B"]);
    assert_eq!(
        csv_rows(&narrow, "p,eps,V,M,p_ycas,err_bound,method").len(),
        1
    );
    let wide = cascade(&[
        "pycas", "--p", "0.7", "--eps", "0.31", "--v", "B", "--tol", "0.05",
    ]);
    assert_eq!(
        csv_rows(&wide, "p,eps,V,M,p_ycas,err_bound,method").len(),
        2
    );
}

#[test]
fn json_rows_carry_the_same_fields_as_csv_columns() {
    let pairs: &[(&[&str], &str)] = &[
        (
            &["derive", "--p", "0.7", "--eps", "0.2", "--v", "B"],
            "p,eps,V,a,b,eta,alpha,p_f,r",
        ),
        (
            &["pycas", "--p", "0.7", "--eps", "0.2", "--v", "B"],
            "p,eps,V,M,p_ycas,err_bound,method",
        ),
        (
            &[
                "simulate",
                "--p",
                "0.7",
                "--eps",
                "0.2",
                "--v",
                "B",
                "--trials",
                "1000",
                "--horizon",
                "500",
            ],
            "p,eps,V,trials,horizon,seed,y,n,undecided,p_hat,ci95",
        ),
        (
            &[
                "find-eps-lower",
                "--p",
                "0.7",
                "--v",
                "B",
                "--grid-step",
                "0.005",
            ],
            "p,V,eps_lower,status",
        ),
    ];
    for (args, header) in pairs {
        let mut json_args = args.to_vec();
        json_args.extend(["--format", "json"]);
        let out = cascade(&json_args);
        assert!(out.status.success());
        let rows: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
        let rows = rows.as_array().expect("top-level list");
        assert!(!rows.is_empty());
        let want: BTreeSet<&str> = header.split(',').collect();
        for row in rows {
            let got: BTreeSet<&str> = row
                .as_object()
                .unwrap()
                .keys()
                .map(String::as_str)
                .collect();
            assert_eq!(got, want, "args: {args:?}");
        }
    }
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let dir = std::env::temp_dir().join("cascade-cli-out-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("curve.csv");
    let path_s = path.to_str().unwrap();
    let args = [
        "curve",
        "--p",
        "0.7",
        "--v",
        "B",
        "--eps-grid",
        "0.1:0.4:0.1",
    ];
    let to_stdout = cascade(&args);
    assert!(to_stdout.status.success());
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path_s]);
    let second = cascade(&with_out);
    assert!(second.status.success());
    assert!(second.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn simulate_counts_are_consistent_and_reproducible() {
    let args = [
        "simulate",
        "--p",
        "0.6",
        "--eps",
        "0.3",
        "--v",
        "G",
        "--trials",
        "30000",
        "--horizon",
        "2000",
        "--seed",
        "9",
    ];
    let first = cascade(&args);
    let rows = csv_rows(
        &first,
        "p,eps,V,trials,horizon,seed,y,n,undecided,p_hat,ci95",
    );
    let row = &rows[0];
    let trials: u64 = row[3].parse().unwrap();
    let y: u64 = row[6].parse().unwrap();
    let n: u64 = row[7].parse().unwrap();
    let undecided: u64 = row[8].parse().unwrap();
    assert_eq!(trials, 30000);
    assert_eq!(y + n + undecided, trials);
    let p_hat: f64 = row[9].parse().unwrap();
    assert!((p_hat - y as f64 / trials as f64).abs() < 1e-12);

    let second = cascade(&args);
    assert_eq!(first.stdout, second.stdout);

    let other_seed = cascade(&[
        "simulate",
        "--p",
        "0.6",
        "--eps",
        "0.3",
        "--v",
        "G",
        "--trials",
        "30000",
        "--horizon",
        "2000",
        "--seed",
        "10",
    ]);
    assert_ne!(first.stdout, other_seed.stdout);
}

#[test]
fn help_lists_every_subcommand() {
    let out = cascade(&["--help"]);
    assert!(out.status.success());
    let text = stdout_str(&out);
    for name in [
        "derive",
        "thresholds",
        "pycas",
        "curve",
        "simulate",
        "limits",
        "find-eps-lower",
    ] {
        assert!(text.contains(name), "missing {name} in --help");
    }
}
