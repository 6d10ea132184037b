use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_groupoid-fourier"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn build(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full = vec!["build"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let out = run(dir.path(), &full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn arrow_count(path: &Path) -> usize {
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["arrows"].as_array().unwrap().len()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn machine(dir: &Path, args: &[&str]) -> serde_json::Value {
    let mut full = args.to_vec();
    full.extend_from_slice(&["--format", "machine"]);
    serde_json::from_str(&stdout(&run(dir, &full))).unwrap()
}

fn record<'a>(report: &'a serde_json::Value, name: &str) -> &'a serde_json::Value {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("no record {name}"))
}

#[test]
fn build_kinds() {
    let dir = TempDir::new().unwrap();
    let p3 = build(&dir, "p3.json", &["pair", "3"]);
    assert_eq!(arrow_count(&p3), 9);
    let doubled = build(&dir, "p3i2.json", &["product-i2", p3.to_str().unwrap()]);
    assert_eq!(arrow_count(&doubled), 36);
    assert_eq!(arrow_count(&build(&dir, "s3.json", &["group", "S3"])), 6);
    assert_eq!(arrow_count(&build(&dir, "b.json", &["bundle", "Z2", "Z3"])), 5);
    let t = build(&dir, "t.json", &["transformation", "Z2", "--action", "0,1,2;1,0,2"]);
    assert_eq!(arrow_count(&t), 6);
    let w = build(&dir, "w.json", &["pair", "2", "--weights", "1,2.5"]);
    assert!(std::fs::read_to_string(w).unwrap().contains("2.5"));

    let table = write(&dir, "bad.json", "[[0, 1], [1, 1]]");
    let out = run(dir.path(), &["build", "group", table.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert_eq!(code(&run(dir.path(), &["build", "pair", "0"])), 2);
    assert_eq!(code(&run(dir.path(), &["build", "transformation", "Z2", "--action", "0,1;0"])), 2);
}

#[test]
fn check_suites_pass_and_fail() {
    let dir = TempDir::new().unwrap();
    let p3 = build(&dir, "p3.json", &["pair", "3"]);
    let p3 = p3.to_str().unwrap();
    let out = run(dir.path(), &["check", p3, "all"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains("status    ok"));

    let w = build(&dir, "w.json", &["pair", "3", "--weights", "1,2.5,0.4"]);
    assert_eq!(code(&run(dir.path(), &["check", w.to_str().unwrap()])), 0);

    let out = run(dir.path(), &["check", p3, "algebra", "--tol=-1"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("FAIL"));

    let broken = write(&dir, "broken.json", "{\"units\": 2, \"arrows\": [");
    assert_eq!(code(&run(dir.path(), &["check", broken.to_str().unwrap()])), 2);
    assert_eq!(code(&run(dir.path(), &["check", "missing.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["check", p3, "nonsense"])), 2);
    assert_eq!(code(&run(dir.path(), &["--bogus"])), 2);
}

#[test]
fn pair_groupoid_dimensions() {
    let dir = TempDir::new().unwrap();
    for n in 2..=4usize {
        let g = build(&dir, &format!("p{n}.json"), &["pair", &n.to_string()]);
        let report = machine(dir.path(), &["check", g.to_str().unwrap(), "regular-rep"]);
        let dims: Vec<f64> = ["dim bounded maps", "dim adjointable maps", "dim VN", "dim reduced algebra"]
            .iter()
            .map(|name| record(&report, name)["value"].as_f64().unwrap())
            .collect();
        let n = n as f64;
        assert_eq!(dims, vec![n.powi(4), n.powi(3), n * n, n * n]);
        let meet = record(&report, "dim VN meet reduced algebra");
        assert_eq!(meet["value"], 1.0);
        assert_eq!(meet["status"], "pass");
    }
}

#[test]
fn norms() {
    let dir = TempDir::new().unwrap();
    let p2 = build(&dir, "p2.json", &["pair", "2"]);
    let p2 = p2.to_str().unwrap();
    // positive definite: the matrix [[2, 1], [1, 1]] in pair layout
    let pd = write(
        &dir,
        "pd.json",
        r#"{"arrows": 4, "values": {"0": [2.0, 0.0], "1": [1.0, 0.0], "2": [1.0, 0.0], "3": [1.0, 0.0]}}"#,
    );
    let report = machine(dir.path(), &["norm", p2, pd.to_str().unwrap(), "bg"]);
    assert!((record(&report, "bg")["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    assert_eq!(record(&report, "chain")["status"], "pass");

    let identity = write(
        &dir,
        "id.json",
        r#"{"arrows": 4, "values": {"0": [1.0, 0.0], "3": [1.0, 0.0]}}"#,
    );
    let report = machine(dir.path(), &["norm", p2, identity.to_str().unwrap(), "reduced"]);
    assert!((record(&report, "reduced")["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let report = machine(dir.path(), &["norm", p2, pd.to_str().unwrap(), "cb"]);
    assert!((record(&report, "cb")["value"].as_f64().unwrap() - 2.0).abs() < 1e-6);
    let report = machine(dir.path(), &["norm", p2, pd.to_str().unwrap(), "ag"]);
    assert!(record(&report, "ag upper")["value"].as_f64().unwrap() >= 2.0 - 1e-9);
    let report = machine(dir.path(), &["norm", p2, pd.to_str().unwrap(), "i"]);
    assert_eq!(record(&report, "I")["value"], 3.0);

    let bundle = build(&dir, "b.json", &["bundle", "Z2", "Z2"]);
    let out = run(dir.path(), &["norm", bundle.to_str().unwrap(), pd.to_str().unwrap(), "cb"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported: cb exact only on pair groupoids"));

    let p3 = build(&dir, "p3.json", &["pair", "3"]);
    let out = run(dir.path(), &["norm", p3.to_str().unwrap(), pd.to_str().unwrap(), "bg"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn duality_counts() {
    let dir = TempDir::new().unwrap();
    let p3 = build(&dir, "p3.json", &["pair", "3"]);
    let report = machine(dir.path(), &["duality", p3.to_str().unwrap()]);
    assert_eq!(record(&report, "bisections")["value"], 6.0);
    assert_eq!(record(&report, "round trips")["status"], "pass");
    assert_eq!(report["status"], "ok");
    let bundle = build(&dir, "b.json", &["bundle", "Z2", "Z3"]);
    let out = run(dir.path(), &["duality", bundle.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bisection 5"));
}

#[test]
fn reports_are_stable_and_mirrored() {
    let dir = TempDir::new().unwrap();
    let g = build(&dir, "t.json", &["transformation", "Z2", "--action", "0,1,2;1,0,2"]);
    let phi = write(&dir, "phi.json", r#"{"arrows": 6, "values": {"1": [0.5, -1.0], "4": [2.0, 0.0]}}"#);
    let args = ["report", g.to_str().unwrap(), phi.to_str().unwrap(), "--seed", "7"];
    let first = run(dir.path(), &args);
    assert_eq!(code(&first), 0, "{}", stdout(&first));
    assert_eq!(first.stdout, run(dir.path(), &args).stdout);

    let report = machine(dir.path(), &args);
    let human = stdout(&first);
    let records = report["records"].as_array().unwrap();
    let lines: Vec<&str> = human
        .lines()
        .filter(|l| l.starts_with("PASS") || l.starts_with("FAIL") || l.starts_with("info"))
        .collect();
    assert_eq!(lines.len(), records.len());
    for (line, r) in lines.iter().zip(records) {
        let label = format!("{}/{}", r["suite"].as_str().unwrap(), r["name"].as_str().unwrap());
        assert!(line.contains(&label), "{line} vs {label}");
    }
    assert!(human.contains("seed      7"));
    assert_eq!(report["seed"], 7);

    let out_path = dir.path().join("report.json");
    let out = run(
        dir.path(),
        &["report", g.to_str().unwrap(), "--seed", "7", "--format", "machine", "--out", out_path.to_str().unwrap()],
    );
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(written["command"], "report");
}
