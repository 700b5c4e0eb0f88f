//! End-to-end tests of the `recur` binary: output formats, exit codes and
//! file round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn recur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recur"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp_path(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("recur-cli-test-{}-{name}", std::process::id()))
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("missing '{key}' in output:\n{text}"))
        .parse()
        .expect("numeric field")
}

#[test]
fn exact_known_value() {
    let out = recur(&["exact", "--n", "1", "--eps", "0.2", "--t", "1.0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((field(&text, "log_prob") - 0.2f64.ln()).abs() < 1e-14);
    assert!((field(&text, "prob") - 0.2).abs() < 1e-14);
    assert!(text.contains("method: exact-det") || text.contains("method: closed-form"));
}

#[test]
fn json_output_schema() {
    let out = recur(&[
        "--format", "json", "exact", "--n", "2", "--eps", "0.2", "--t", "1.0",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["command"], "exact");
    assert!(v["log_prob"].is_f64());
    assert!(v["prob"].is_f64());
    assert!(v["method"].is_string());
    assert!(v["diagnostics"].is_array());
}

#[test]
fn windows_lists_intervals() {
    let out = recur(&["windows", "--t", "2.0", "--eps", "0.2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("regime: boundary (k = 1)"), "{text}");
    assert!(text.contains("lo,hi"));
    let rows: Vec<&str> = text
        .lines()
        .skip_while(|l| *l != "lo,hi")
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 3);
    // first interval starts at -pi
    let lo: f64 = rows[0].split(',').next().unwrap().parse().unwrap();
    assert!((lo + std::f64::consts::PI).abs() < 1e-15);
}

#[test]
fn scan_csv_round_trips() {
    let path = tmp_path("scan.csv");
    let out = recur(&[
        "scan",
        "--n", "3",
        "--eps", "0.2",
        "--t-min", "0.4",
        "--t-max", "1.6",
        "--t-step", "0.2",
        "--method", "exact,asympt,abia",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,log_prob,log_prob_over_n2,method");
    let mut n_rows = 0;
    for line in lines {
        let parts: Vec<&str> = line.split(',').collect();
        assert_eq!(parts.len(), 4);
        for p in &parts[..3] {
            // 17 significant digits: parse -> reformat is the identity
            let x: f64 = p.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), *p);
        }
        assert!(["exact", "asympt", "abia"].contains(&parts[3]));
        n_rows += 1;
    }
    // 7 grid points x 3 methods, every method defined on this grid
    assert_eq!(n_rows, 21);
    std::fs::remove_file(&path).ok();
}

#[test]
fn scan_with_no_valid_rows_emits_header_only() {
    // asympt is undefined off the one-cut interval and away from integers
    let path = tmp_path("empty.csv");
    let out = recur(&[
        "scan",
        "--n", "3",
        "--eps", "0.2",
        "--t-min", "5.3",
        "--t-max", "5.4",
        "--t-step", "0.05",
        "--method", "asympt",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.trim_end(), "t,log_prob,log_prob_over_n2,method");
    std::fs::remove_file(&path).ok();
}

#[test]
fn mc_experiment_and_fit_round_trip() {
    let path = tmp_path("mc.csv");
    let out = recur(&[
        "mc-first-return",
        "--n", "3",
        "--eps", "0.25",
        "--samples", "64",
        "--model", "iid",
        "--time", "continuous",
        "--seed", "7",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("sample_id,tau,normalized,horizon_hit"));
    assert_eq!(text.lines().count(), 65);

    let out = recur(&["mc-fit", "--in", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fit_text = stdout(&out);
    let lambda = field(&fit_text, "lambda_hat");
    assert!(lambda > 0.2 && lambda < 5.0, "{lambda}");
    assert!(fit_text.contains("censored: 0"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn threshold_and_recurrence_values() {
    let out = recur(&["threshold", "--delta", "0.5"]);
    assert!(out.status.success());
    let tc = field(&stdout(&out), "t_c");
    assert!((tc - 0.6034).abs() < 1e-3);

    let out = recur(&["recurrence", "--n", "3", "--delta", "0.1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let a = field(&text, "sinc_root");
    let est = field(&text, "estimate");
    assert!((est - 4.0 / (a * a) / 3.0).abs() < 1e-9);
}

#[test]
fn weak_real_asympt_and_abia_run() {
    let out = recur(&["weak", "--n", "10", "--t", "4.0", "--delta", "0.1"]);
    assert!((field(&stdout(&out), "log_prob") + 20.25).abs() < 1e-12);

    let out = recur(&["real", "--n", "10", "--t", "4.0", "--delta", "0.1"]);
    assert!(field(&stdout(&out), "log_prob") < -20.25);

    let out = recur(&["asympt", "--n", "7", "--eps", "0.2", "--t", "1.0"]);
    assert!(out.status.success());

    let out = recur(&["abia", "--eps", "0.2", "--t", "3.0", "--fractions"]);
    let text = stdout(&out);
    assert!((field(&text, "log_prob_over_n2") + 0.386_561).abs() < 1e-5);
    let fr_line = text
        .lines()
        .find(|l| l.starts_with("fractions: "))
        .expect("fractions line");
    let fractions: Vec<f64> = fr_line["fractions: ".len()..]
        .split(',')
        .map(|s| s.parse().unwrap())
        .collect();
    assert_eq!(fractions.len(), 3);
    for f in fractions {
        assert!((f - 1.0 / 3.0).abs() < 1e-9);
    }
}

#[test]
fn exit_codes() {
    // domain error -> 1
    let out = recur(&["exact", "--n", "3", "--eps", "1.5", "--t", "1.0"]);
    assert_eq!(out.status.code(), Some(1));
    // usage error -> 64
    let out = recur(&["exact", "--n", "3", "--bogus-flag", "1"]);
    assert_eq!(out.status.code(), Some(64));
    let out = recur(&["no-such-command"]);
    assert_eq!(out.status.code(), Some(64));
    // help -> 0
    let out = recur(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn threads_flag_and_env_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_recur"))
        .args(["--threads", "2", "exact", "--n", "2", "--eps", "0.2", "--t", "0.9"])
        .env("RECUR_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}
