//! End-to-end tests of the `clocksync` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn clocksync(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clocksync"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<Value> {
    stdout(o)
        .lines()
        .filter(|l| l.starts_with('{'))
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn summary(o: &Output) -> Value {
    records(o)
        .into_iter()
        .find(|r| r["record"] == "summary")
        .expect("summary record")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_built_in_counterexamples() {
    for args in [
        &[
            "verify",
            "chain",
            "--period",
            "2",
            "--m",
            "3",
            "--n",
            "5",
            "--horizon",
            "60",
        ][..],
        &[
            "verify",
            "h",
            "--period",
            "2",
            "--m",
            "4",
            "--horizon",
            "80",
        ],
        &[
            "verify",
            "rooted",
            "--period",
            "2",
            "--m",
            "2",
            "--c0",
            "1",
            "--growth",
            "successor",
            "--blocks",
            "4",
        ],
    ] {
        let o = clocksync(args);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert_eq!(summary(&o)["passed"], true);
        assert!(stdout(&o).contains("check PASS closed form"));
    }
}

#[test]
fn run_chain_never_synchronizes() {
    let o = clocksync(&[
        "run",
        "--algorithm",
        "sap-fixed",
        "--scenario",
        "chain",
        "--m",
        "3",
        "--verbosity",
        "0",
    ]);
    assert!(o.status.success());
    let run = records(&o)
        .into_iter()
        .find(|r| r["record"] == "run")
        .unwrap();
    assert_eq!(run["status"]["kind"], "not_within_horizon");
    assert_eq!(run["rounds"], 300);
    assert!(run["expectations"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["violations"] == 0));
}

#[test]
fn run_minmax_within_diameter_bound() {
    let o = clocksync(&[
        "run",
        "--algorithm",
        "minmax",
        "--scenario",
        "random-rooted",
        "--class",
        "strongly-connected",
        "--include-stronger",
        "--n",
        "4",
        "--delta",
        "1",
        "--init",
        "random",
        "--h0",
        "0",
        "--reps",
        "5",
        "--verbosity",
        "0",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    for run in records(&o).into_iter().filter(|r| r["record"] == "run") {
        let b = run["bounds"]
            .as_array()
            .unwrap()
            .iter()
            .find(|b| b["name"] == "2D + h(0)")
            .unwrap()
            .clone();
        assert_eq!(b["satisfied"], true);
        assert!(run["stabilization_round"].as_u64().unwrap() <= b["value"].as_u64().unwrap());
    }
}

#[test]
fn repetitions_are_deterministic_and_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (
        dir.path().join("a"),
        dir.path().join("b"),
        dir.path().join("c"),
    );
    let args = |out: &Path| {
        vec![
            "run".to_string(),
            "--algorithm".into(),
            "sap".into(),
            "--scenario".into(),
            "random-rooted".into(),
            "--class".into(),
            "uniformly-rooted".into(),
            "--n".into(),
            "4".into(),
            "--init".into(),
            "random".into(),
            "--reps".into(),
            "3".into(),
            "--seed".into(),
            "11".into(),
            "--out".into(),
            path(out).into(),
        ]
    };
    let run = |v: Vec<String>| clocksync(&v.iter().map(String::as_str).collect::<Vec<_>>());
    assert!(run(args(&a)).status.success());
    assert!(run(args(&b)).status.success());
    let cfg = a.join("config.json");
    assert!(
        clocksync(&["run", "--config", path(&cfg), "--out", path(&c)])
            .status
            .success()
    );

    let sa = fs::read_to_string(a.join("summary.jsonl")).unwrap();
    assert_eq!(sa, fs::read_to_string(b.join("summary.jsonl")).unwrap());
    assert_eq!(sa, fs::read_to_string(c.join("summary.jsonl")).unwrap());
    let seeds: Vec<u64> = sa
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|r| r["record"] == "run")
        .map(|r| r["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, vec![11, 12, 13]);
    // Traces at the default verbosity, header line first.
    let trace = fs::read_to_string(a.join("trace-12.jsonl")).unwrap();
    let header: Value = serde_json::from_str(trace.lines().next().unwrap()).unwrap();
    assert_eq!(header["record"], "header");
    assert_eq!(header["seed"], 12);
}

#[test]
fn no_traces_at_verbosity_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = clocksync(&[
        "run",
        "--algorithm",
        "sap-fixed",
        "--scenario",
        "h",
        "--m",
        "4",
        "--verbosity",
        "0",
        "--out",
        path(dir.path()),
    ]);
    assert!(o.status.success());
    assert!(dir.path().join("summary.jsonl").exists());
    assert!(!dir.path().join("trace-0.jsonl").exists());
}

#[test]
fn analyze_reports_classes() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    assert!(
        clocksync(&["scenario", "export", "h", "--m", "4", "--out", path(&h)])
            .status
            .success()
    );
    let o = clocksync(&["analyze", path(&h)]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("uniformly_rooted=delay 1 roots {0}"));
    assert!(text.contains("center={0}"));
    let rec = records(&o).pop().unwrap();
    assert_eq!(rec["record"], "analysis");
    assert_eq!(rec["class"]["uniformly_rooted"]["delay"], 1);

    let k = dir.path().join("k4.txt");
    let edges: Vec<String> = (0..4)
        .flat_map(|i| {
            (0..4)
                .filter(move |&j| j != i)
                .map(move |j| format!("({i},{j})"))
        })
        .collect();
    fs::write(&k, format!("n=4\ncycle:\nround 1: {}\n", edges.join(" "))).unwrap();
    let text = stdout(&clocksync(&["analyze", path(&k)]));
    assert!(text.contains("strongly_connected_with_delay=1"));
    assert!(text.contains("diameter=1"));

    let r = dir.path().join("rooted.txt");
    let o = clocksync(&["scenario", "export", "rooted", "--m", "2"]);
    fs::write(&r, stdout(&o)).unwrap();
    assert!(stdout(&clocksync(&["analyze", path(&r)])).contains("rooted_with_delay=2"));
}

#[test]
fn exported_schedule_runs_with_its_init() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.txt");
    assert!(
        clocksync(&["scenario", "export", "h", "--m", "4", "--out", path(&h)])
            .status
            .success()
    );
    let o = clocksync(&[
        "run",
        "--algorithm",
        "sap",
        "--schedule",
        path(&h),
        "--m",
        "4",
        "--verbosity",
        "0",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let run = records(&o)
        .into_iter()
        .find(|r| r["record"] == "run")
        .unwrap();
    assert_eq!(run["init"], "suggested");
    assert_eq!(run["stabilization_round"], 9);
    assert_eq!(run["measured"]["m_z"], 4);
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    fs::write(&f, "n=2\ncycle:\nround 1: (0,7)\n").unwrap();
    let o = clocksync(&["analyze", path(&f)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(records(&o)[0]["record"], "error");
}

#[test]
fn short_horizon_is_a_measurement_failure() {
    let o = clocksync(&[
        "run",
        "--algorithm",
        "minmax",
        "--scenario",
        "rooted",
        "--m",
        "2",
        "--horizon",
        "2",
        "--verbosity",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    let s = summary(&o);
    assert_eq!(s["passed"], false);
    assert_eq!(s["unmeasured_seeds"], serde_json::json!([0]));
}

#[test]
fn config_errors_are_reported() {
    let o = clocksync(&["run", "--algorithm", "sap", "--scenario", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(records(&o)[0]["record"], "error");
    let o = clocksync(&[
        "run",
        "--algorithm",
        "sap",
        "--scenario",
        "chain",
        "--reps",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scenario_list_names_everything() {
    let text = stdout(&clocksync(&["scenario", "list"]));
    for name in [
        "chain",
        "h",
        "rooted",
        "star-2cycle",
        "star-growing",
        "link-loss",
        "round-robin",
        "random-rooted",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
    let o = clocksync(&["scenario", "export", "star-growing"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_table() {
    let o = clocksync(&[
        "bounds",
        "--diameter",
        "4",
        "--period",
        "2",
        "--growth",
        "constant:10",
    ]);
    assert!(o.status.success());
    let rows = records(&o);
    let find = |alg: &str, kind: &str| {
        rows.iter()
            .find(|r| r["algorithm"] == alg && r["kind"] == kind)
            .map(|r| r["value"].clone())
            .unwrap()
    };
    assert_eq!(find("MinMax", "time"), 8);
    assert_eq!(find("SAP constant:10", "time"), 12);
    assert_eq!(find("SAP constant:4", "memory"), 8);
}
