use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn twoatom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoatom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut all = args.to_vec();
    all.extend(["--out", dir.to_str().unwrap()]);
    twoatom(&all)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    v.sort();
    v
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("run.json");
    fs::write(&p, json).unwrap();
    p.to_str().unwrap().to_owned()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|h| h == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn rates_preset_writes_expected_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["rates", "--preset", "fig2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(files(dir.path()), ["fig2_rates.csv", "fig2_rates.svg"]);
    let csv = fs::read_to_string(dir.path().join("fig2_rates.csv")).unwrap();
    assert_eq!(
        csv.lines().next(),
        Some("kr,gamma12_over_gamma,lambda12_over_gamma")
    );
    assert_eq!(csv.lines().count(), 401);
    let svg = fs::read_to_string(dir.path().join("fig2_rates.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn symmetric_pulse_peaks_at_unity() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["simulate", "--preset", "fig4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    for kr in ["0.3", "0.5", "1", "2", "5"] {
        let csv = fs::read_to_string(dir.path().join(format!("fig4_kr{kr}.csv"))).unwrap();
        assert_eq!(
            csv.lines().next(),
            Some("t,P_gg,P_s,P_a,P_ee,P_atom1,P_atom2,re_coh_sa,im_coh_sa")
        );
        let peak = column(&csv, "P_s").into_iter().fold(0.0, f64::max);
        assert!((0.999..=1.0005).contains(&peak), "kr {kr}: {peak}");
        let env =
            fs::read_to_string(dir.path().join(format!("fig4_kr{kr}_envelope_s.csv"))).unwrap();
        assert_eq!(env.lines().next(), Some("t,re_xi,im_xi"));
    }
}

#[test]
fn coherent_sweep_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["coherent", "--preset", "fig7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("fig7_sweep.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("kr,maxPs,Pee,Pa,Pgg"));
    assert_eq!(column(&csv, "kr"), [0.5, 1.0, 2.0]);
    for p in column(&csv, "maxPs") {
        assert!(p > 0.3 && p < 0.6, "{p}");
    }
}

#[test]
fn optimize_scan_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"scan": {"from": 0.5, "to": 5, "count": 5, "log": true}, "budget": 20, "plot": false}"#,
    );
    let o = run_in(
        dir.path(),
        &["optimize", "--preset", "optimize_rising", "--config", &cfg],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let scan = fs::read_to_string(dir.path().join("optimize_rising_kr0.5_scan.csv")).unwrap();
    assert_eq!(scan.lines().next(), Some("bandwidth,peak"));
    assert_eq!(scan.lines().count(), 6);
    let trace = fs::read_to_string(dir.path().join("optimize_rising_kr0.5_trace.csv")).unwrap();
    assert_eq!(trace.lines().next(), Some("bandwidth,peak"));
    assert!(!dir.path().join("optimize_rising_scan.svg").exists());
}

#[test]
fn repeated_runs_are_byte_identical_across_worker_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&a, "1"), (&b, "4"), (&c, "4")] {
        let o = run_in(
            dir.path(),
            &["decay", "--preset", "fig3", "--workers", workers],
        );
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let names = files(a.path());
    assert_eq!(names, files(b.path()));
    assert_eq!(names.len(), 10);
    for n in &names {
        let x = fs::read(a.path().join(n)).unwrap();
        assert_eq!(x, fs::read(b.path().join(n)).unwrap(), "{n}");
        assert_eq!(x, fs::read(c.path().join(n)).unwrap(), "{n}");
    }
}

#[test]
fn missing_output_dir_is_an_io_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("no_such_dir");
    let o = run_in(&missing, &["rates", "--preset", "fig2"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(
        stderr(&o).contains(missing.to_str().unwrap()),
        "{}",
        stderr(&o)
    );
}

#[test]
fn missing_config_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["rates", "--config", "/nonexistent/run.json"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stderr(&o).contains("/nonexistent/run.json"));
}

#[test]
fn validation_failures_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"kr": [1, 0.0001]}"#,
        r#"{"kr": []}"#,
        r#"{"kr": [1, 1]}"#,
        r#"{"samples": 1}"#,
        r#"{"window": [3, 1]}"#,
        r#"{"gamma": -1}"#,
        r#"{"unknown_key": 1}"#,
        r#"{"command": "decay"}"#,
        r#"{"profile": {"c_s": [0, 0], "c_a": [0, 0]}}"#,
        "not json",
    ];
    for json in cases {
        let cfg = write_config(dir.path(), json);
        let o = run_in(dir.path(), &["simulate", "--config", &cfg]);
        assert_eq!(o.status.code(), Some(3), "{json}: {}", stderr(&o));
        assert_eq!(files(dir.path()), ["run.json"], "{json}");
    }
}

#[test]
fn late_row_failure_reports_index_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"kr": [0.5, 1, 2, 1e-5]}"#);
    let o = run_in(dir.path(), &["rates", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
    assert_eq!(files(dir.path()), ["run.json"]);
}

#[test]
fn command_specific_validation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["rates", "--preset", "fig99"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("fig99"));
    let o = run_in(dir.path(), &["coherent", "--preset", "fig4"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let o = run_in(dir.path(), &["optimize"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run_in(dir.path(), &["decay", "--preset", "fig3", "--workers", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let cfg = write_config(dir.path(), r#"{"window": [-1, 5]}"#);
    let o = run_in(dir.path(), &["decay", "--preset", "fig3", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(files(dir.path()), ["run.json"]);
}

#[test]
fn first_atom_target_requires_pair_family() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"target": "eg", "profile": "first_atom", "family": {"kind": "square", "duration": [0.1, 10]}}"#,
    );
    let o = run_in(dir.path(), &["optimize", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
