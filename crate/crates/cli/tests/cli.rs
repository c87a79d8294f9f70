use std::path::Path;
use std::process::{Command, Output};

fn whmapf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_whmapf")).current_dir(dir).env_remove("WHMAPF_OUT_DIR").args(args).output().expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn setup(dir: &Path) {
    ok(&whmapf(dir, &["generate-layout", "--template", "1row", "--out", "layout.json"]));
    ok(&whmapf(dir, &["generate-scenario", "--layout", "layout.json", "--orders", "3", "--seed", "4", "--out", "scenario.json"]));
}

#[test]
fn layouts_for_every_template() {
    let dir = tempfile::tempdir().unwrap();
    for t in ["1row", "2row", "3row", "large"] {
        let file = format!("{t}.json");
        ok(&whmapf(dir.path(), &["generate-layout", "--template", t, "--out", &file]));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(&file)).unwrap()).unwrap();
        let agents = v["agents"].as_array().unwrap().len();
        assert_eq!(agents, if t == "large" { 10 } else { 4 });
    }
    ok(&whmapf(dir.path(), &["generate-layout", "--template", "3row", "--shelves", "5", "--workstations", "2", "--out", "x.json"]));
}

#[test]
fn bad_parameters_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(whmapf(dir.path(), &["generate-layout", "--template", "1row", "--shelves", "0"]).status.code(), Some(1));
    assert_eq!(whmapf(dir.path(), &["generate-layout", "--template", "7row"]).status.code(), Some(1));
    assert_eq!(whmapf(dir.path(), &["plan", "--layout", "missing.json", "--scenario", "missing.json"]).status.code(), Some(1));
    assert_eq!(whmapf(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn plan_simulate_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    setup(d);
    let out = ok(&whmapf(d, &["plan", "--layout", "layout.json", "--scenario", "scenario.json", "--robots", "2", "--out", "runs/a.json"]));
    assert!(out.starts_with("# seed: 4\n"), "{out}");
    assert!(out.contains("name,robots,seed,feasible"));
    let first = std::fs::read_to_string(d.join("runs/a.json")).unwrap();
    ok(&whmapf(d, &["plan", "--layout", "layout.json", "--scenario", "scenario.json", "--robots", "2", "--out", "again.json"]));
    let again = std::fs::read_to_string(d.join("again.json")).unwrap();
    let strip = |s: &str| {
        let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
        v["plan"]["stats"]["wall"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&first), strip(&again), "planning is deterministic");

    let sim = ok(&whmapf(d, &["simulate", "--plan", "runs/a.json", "--noise", "none", "--out", "runs/a.ttf.csv", "--trace", "runs/a.trace.jsonl"]));
    assert!(sim.contains("collisions 0"), "{sim}");
    let csv = std::fs::read_to_string(d.join("runs/a.ttf.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("0,inf,")), "{csv}");

    let noisy = |out: &str| {
        ok(&whmapf(d, &["simulate", "--plan", "runs/a.json", "--noise", "pert", "--seeds", "5", "--seed", "9", "--delta", "0", "--out", out]));
        std::fs::read_to_string(d.join(out)).unwrap()
    };
    assert_eq!(noisy("n1.csv"), noisy("n2.csv"));
    assert!(noisy("n1.csv").contains("# seeds: 9..=13"));
    assert_eq!(whmapf(d, &["simulate", "--plan", "runs/a.json", "--delta", "2"]).status.code(), Some(1));

    ok(&whmapf(d, &["report", "--runs", "runs"]));
    let report = std::fs::read_to_string(d.join("runs/report.csv")).unwrap();
    let rows: Vec<&str> = report.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2, "{report}");
    assert!(rows[1].starts_with("a,2,4,true,"));
    assert!(rows[1].ends_with(",inf"));
    let svg = std::fs::read_to_string(d.join("runs/a.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert!(svg.contains("class=\"realized\""));
}

#[test]
fn empty_report_directory() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir(dir.path().join("runs")).unwrap();
    ok(&whmapf(dir.path(), &["report", "--runs", "runs"]));
    let report = std::fs::read_to_string(dir.path().join("runs/report.csv")).unwrap();
    assert_eq!(report.lines().count(), 1);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_whmapf"))
        .current_dir(dir.path())
        .env("WHMAPF_OUT_DIR", "outputs")
        .args(["generate-layout", "--template", "2row"])
        .output()
        .unwrap();
    ok(&out);
    assert!(dir.path().join("outputs/layout.json").exists());
}

#[test]
fn infeasible_plan_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    setup(d);
    // Two robots that both start on the same waiting place can never separate.
    let mut layout: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("layout.json")).unwrap()).unwrap();
    let start = layout["agents"][0]["start"].clone();
    layout["agents"][1]["start"] = start;
    std::fs::write(d.join("clash.json"), layout.to_string()).unwrap();
    let out = whmapf(d, &["plan", "--layout", "clash.json", "--scenario", "scenario.json", "--robots", "2"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}
