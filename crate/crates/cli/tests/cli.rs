use std::process::Command;

use spinmr::format::SWEEP_CSV_HEADER;
use spinmr_cli::{main_with, RunConfig};

fn run(args: &str) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(std::iter::once("spinmr").chain(args.split_whitespace()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(text: &str, name: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(name).filter(|r| r.starts_with(' ')))
        .unwrap_or_else(|| panic!("no {name} in {text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn evaluate_reports_violation_at_half_sharpness() {
    let (code, out, err) = run("evaluate --two-j 30 --lambda 0.5 --gamma 0");
    assert_eq!(code, 0, "{err}");
    assert!((field(&out, "lgi_violation") - 0.2504).abs() < 1e-4);
}

#[test]
fn evaluate_zero_sharpness_has_no_nsit_signal() {
    let (code, out, _) = run("evaluate --two-j 30 --lambda 0 --gamma 0");
    assert_eq!(code, 0);
    assert_eq!(field(&out, "k_nsit"), 0.0);
}

#[test]
fn evaluate_rejects_lambda_above_ceiling() {
    let (code, out, err) = run("evaluate --two-j 30 --lambda 0.9 --gamma 0.05");
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[invalid-params]: "), "{err}");
    assert!(err.contains("λ exceeds 1 − jγ = 0.25"), "{err}");
}

#[test]
fn usage_errors_are_single_line() {
    for args in [
        "evaluate --lambda 0.5",
        "evaluate --j 7.5 --lambda 0.5",
        "frobnicate",
        "",
        "sweep --two-j 4 --lambda 0.1 --gamma-grid 0:1",
    ] {
        let (code, _, err) = run(args);
        assert_eq!(code, 2, "{args}");
        assert_eq!(err.lines().count(), 1, "{args}: {err}");
        assert!(err.starts_with("error[usage]: "), "{args}: {err}");
    }
}

#[test]
fn threshold_matches_reference_table() {
    let (code, out, _) = run("threshold --two-j 30 --gamma 0 --condition lgi --format csv");
    assert_eq!(code, 0);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    let th: f64 = row[3].parse().unwrap();
    assert!((th - 0.29).abs() <= 0.01, "{th}");
}

#[test]
fn sweep_csv_schema_and_monotone_lgi() {
    let (code, out, _) = run("sweep --two-j 40 --lambda 0.5 --gamma-grid 0:0.025:26");
    assert_eq!(code, 0);
    assert!(!out.contains('\r'));
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 26);
    assert_eq!(rows[25][2], 0.025);
    assert!(rows.windows(2).all(|w| w[1][4] >= w[0][4]));
}

#[test]
fn sweep_names_the_bad_grid_point() {
    let (code, _, err) = run("sweep --two-j 40 --lambda 0.5 --gamma-grid 0,0.01,0.06");
    assert_eq!(code, 2);
    assert!(err.contains("grid point 2"), "{err}");
}

#[test]
fn sweep_output_is_deterministic_across_thread_counts() {
    let (_, a, _) = run("sweep --two-j 30 --lambda 0.05 --gamma-grid 0:0.06:31");
    let (_, b, _) = run("sweep --two-j 30 --lambda 0.05 --gamma-grid 0:0.06:31");
    assert_eq!(a.lines().count(), 32);
    assert_eq!(a, b);
    let exe = env!("CARGO_BIN_EXE_spinmr");
    let args = ["sweep", "--two-j", "30", "--lambda", "0.05", "--gamma-grid", "0:0.06:31"];
    let one = Command::new(exe).args(args).args(["--threads", "1"]).output().unwrap();
    let many = Command::new(exe).args(args).args(["--threads", "4"]).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, a.as_bytes());
}

#[test]
fn json_is_parseable_and_exact() {
    let (code, out, _) = run("evaluate --two-j 10 --lambda 0.3 --gamma 0.1 --format json");
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["two_j"], 10);
    assert_eq!(v["gamma"].as_f64(), Some(0.1));
    let (_, csv, _) = run("evaluate --two-j 10 --lambda 0.3 --gamma 0.1 --format csv");
    let k_lgi: f64 = csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(v["k_lgi"].as_f64(), Some(k_lgi));
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("spinmr-cli-test-{}.csv", std::process::id()));
    let (code, out, _) =
        run(&format!("sweep --two-j 6 --lambda 0.2 --gamma-grid 0,0.1 --output {}", path.display()));
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written.lines().count(), 3);
}

#[test]
fn reproduce_table3_has_27_cells() {
    let (code, out, _) = run("reproduce --table 3 --format csv");
    assert_eq!(code, 0);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r.starts_with("3,")));
}

#[test]
fn strict_formula_validation_exits_four_on_mismatch() {
    let (code, out, err) = run("validate-formulas --strict --format csv");
    assert!(!out.is_empty());
    if out.contains(",mismatch") {
        assert_eq!(code, 4);
        assert!(err.starts_with("error[formula-mismatch]: "));
        assert_eq!(err.lines().count(), 1);
    } else {
        assert_eq!(code, 0);
    }
    let (lenient, _, _) = run("validate-formulas --format csv");
    assert_eq!(lenient, 0);
}

#[test]
fn help_goes_to_stdout_with_success() {
    let (code, out, err) = run("--help");
    assert_eq!(code, 0);
    assert!(out.contains("validate-formulas"));
    assert!(err.is_empty());
}

#[test]
fn canonical_form_round_trips() {
    let cases = [
        "evaluate --j 15 --lambda 0.5",
        "evaluate --two-j 7 --lambda 0.1 --gamma 0.2 --format json --threads 2",
        "threshold --two-j 30 --gamma 0.03 --condition wlgi --tol 1e-5",
        "sweep --two-j 40 --lambda 0.5 --gamma-grid 0:0.025:26 --output out.csv",
        "sweep --two-j 40 --lambda 0.5 --gamma-grid 0,0.1e-1,0.02",
        "reproduce --table 3 --exact-gamma",
        "validate-formulas --strict --per-spin 30 --seed 9",
    ];
    for case in cases {
        let parsed = RunConfig::parse_from(std::iter::once("spinmr").chain(case.split_whitespace())).unwrap();
        let canon = parsed.canonical();
        let again =
            RunConfig::parse_from(std::iter::once("spinmr".to_string()).chain(parsed.canonical_args()))
                .unwrap();
        assert_eq!(parsed, again, "{case}");
        assert_eq!(canon, again.canonical(), "{case}");
    }
}
