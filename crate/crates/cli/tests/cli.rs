use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const PLATEAU: f64 = 24.0 / (std::f64::consts::PI * std::f64::consts::PI);

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perforated"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let data = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    (header, data)
}

#[test]
fn pdist_has_the_plateau_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["pdist", "--tmax", "5", "--points", "501"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, data) = rows(&dir.path().join("pdist.csv"));
    assert_eq!(header, ["t", "p", "pdot", "upsilon"]);
    assert_eq!(data.len(), 501);
    assert_eq!(data[0][1], 1.0);
    for r in data.iter().filter(|r| r[0] > 0.0 && r[0] <= 0.5) {
        assert!((r[3] - PLATEAU).abs() <= 1e-12, "Υ({}) = {}", r[0], r[3]);
    }
    let table = dir.path().join("pdist.csv");
    let v = run(dir.path(), &["verify", "--table", table.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
}

#[test]
fn tampered_table_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["pdist", "--tmax", "2", "--points", "201"]).status.success());
    let path = dir.path().join("pdist.csv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[10] = lines[10].replacen("e-1,", "e-2,", 1);
    fs::write(&path, lines.join("\n")).unwrap();
    let v = run(dir.path(), &["verify", "--table", path.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
}

#[test]
fn rate_row_lies_in_the_strip() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["rate", "--sigma", "1"]);
    assert!(out.status.success());
    let (header, data) = rows(&dir.path().join("rates.csv"));
    assert_eq!(header, ["sigma", "xi", "lambda", "residual", "c_multiplier"]);
    let r = &data[0];
    assert!(r[1] > -1.0 && r[1] < 0.0);
    assert!(r[3] <= 1e-10);
}

#[test]
fn simulate_is_byte_identical_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "7", "simulate", "--n", "4000", "--bins", "20", "--checkpoints", "1,3"];
    assert!(run(dir.path(), &args).status.success());
    let first = fs::read(dir.path().join("survival.csv")).unwrap();
    let hist = fs::read(dir.path().join("age_histograms.csv")).unwrap();
    let threads = ["--threads", "1"];
    let again = [&threads[..], &args[..]].concat();
    assert!(run(dir.path(), &again).status.success());
    assert_eq!(first, fs::read(dir.path().join("survival.csv")).unwrap());
    assert_eq!(hist, fs::read(dir.path().join("age_histograms.csv")).unwrap());

    let replay_dir = tempfile::tempdir().unwrap();
    let sidecar = dir.path().join("survival.sidecar.json");
    let out = run(replay_dir.path(), &["--replay", sidecar.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(first, fs::read(replay_dir.path().join("survival.csv")).unwrap());
    assert_eq!(
        fs::read(&sidecar).unwrap(),
        fs::read(replay_dir.path().join("survival.sidecar.json")).unwrap()
    );
}

#[test]
fn compare_reports_a_nonnegative_l1() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["simulate", "--n", "5000", "--horizon", "5", "--bins", "25"]).status.success());
    assert!(run(dir.path(), &["renewal", "--horizon", "5", "--step", "0.01"]).status.success());
    let mc = dir.path().join("survival.csv");
    let rn = dir.path().join("renewal.csv");
    let out = run(
        dir.path(),
        &["compare", "--mc", mc.to_str().unwrap(), "--renewal", rn.to_str().unwrap()],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    let l1: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("relative_l1,"))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..0.1).contains(&l1));
}

#[test]
fn json_format_writes_records() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(dir.path(), &["--format", "json", "rate", "--sweep", "1:10:3"]).status.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rates.json")).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["sigma"], 1.0);
    assert_eq!(rows[2]["sigma"], 10.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad_range = run(dir.path(), &["pdist", "--tmax", "-1"]);
    assert_eq!(bad_range.status.code(), Some(2));
    let coarse = run(dir.path(), &["renewal", "--step", "2"]);
    assert_eq!(coarse.status.code(), Some(2));
    let unknown = run(dir.path(), &["nonsense"]);
    assert_eq!(unknown.status.code(), Some(2));

    let broken = dir.path().join("broken.csv");
    fs::write(&broken, "t,survival,stderr\n0,1,0\n0.5,oops,0\n").unwrap();
    let out = run(
        dir.path(),
        &["compare", "--mc", broken.to_str().unwrap(), "--renewal", broken.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("broken.csv:3"), "{msg}");

    // Too few survivors to fit a rate is reported, not fatal.
    let out = run(dir.path(), &["simulate", "--n", "50", "--fit", "1:5"]);
    assert!(out.status.success());
    let sidecar = fs::read_to_string(dir.path().join("survival.sidecar.json")).unwrap();
    assert!(sidecar.contains("insufficient statistics"));
}

#[test]
fn quick_verification_passes_within_budget() {
    let dir = tempfile::tempdir().unwrap();
    let start = std::time::Instant::now();
    let out = run(dir.path(), &["verify", "--quick"]);
    let elapsed = start.elapsed().as_secs_f64();
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains("[PASS]")).count(), 11);
    assert!(elapsed < 300.0, "verify --quick took {elapsed:.0} s");
}
