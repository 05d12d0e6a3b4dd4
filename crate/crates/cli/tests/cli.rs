use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SPEC: &str = "\
seed = 7
label_half_width = 64
segment = ar2 a1=1.6 a2=-0.9 sigma=1 length=1200
segment = sine freq=0.125 amp=8 length=600
";

const CONFIG: &str = "\
w = 16
M = 16
ov_rate = 0.3
sig_dims = 2
nor_dims = 8
";

fn dsad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsad")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = dsad(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn setup() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("spec.txt"), SPEC).unwrap();
    fs::write(dir.path().join("config.txt"), CONFIG).unwrap();
    ok(&["synth", "--spec", &p(&dir, "spec.txt"), "--out", &p(&dir, "series.csv")]);
    dir
}

fn auc_line(stdout: &str) -> f64 {
    let line = stdout.trim();
    assert_eq!(stdout.lines().count(), 1, "{stdout}");
    line.strip_prefix("auc=").unwrap().parse().unwrap()
}

#[test]
fn eval_prints_one_auc_line() {
    let dir = setup();
    for method in ["ds", "ssa1", "ssa5", "ssaall", "ar"] {
        let out = ok(&["eval", "--input", &p(&dir, "series.csv"), "--method", method, "--config", &p(&dir, "config.txt")]);
        let auc = auc_line(&out);
        assert!((0.0..=1.0).contains(&auc), "{method}: {auc}");
    }
}

#[test]
fn detect_on_training_data_reproduces_threshold() {
    let dir = setup();
    let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let normal: String = text.lines().take(500).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("normal.csv"), normal).unwrap();
    let (normal, model, scores) = (p(&dir, "normal.csv"), p(&dir, "model.txt"), p(&dir, "scores.csv"));
    ok(&["train", "--input", &normal, "--config", &p(&dir, "config.txt"), "--out", &model]);
    ok(&["detect", "--input", &normal, "--model", &model, "--out", &scores]);

    let rows = fs::read_to_string(&scores).unwrap();
    let mut lines = rows.lines();
    assert_eq!(lines.next(), Some("time_index,degree,flag"));
    let degrees: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    let mean = degrees.iter().sum::<f64>() / degrees.len() as f64;
    let model_text = fs::read_to_string(&model).unwrap();
    let threshold: f64 = model_text
        .lines()
        .find_map(|l| l.strip_prefix("threshold = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((mean - threshold).abs() <= 1e-10 * threshold.max(1.0), "{mean} vs {threshold}");
}

#[test]
fn one_cell_sweep_matches_eval() {
    let dir = setup();
    let input = p(&dir, "series.csv");
    let eval = auc_line(&ok(&["eval", "--input", &input, "--method", "ssa1", "--config", &p(&dir, "config.txt")]));
    let report = p(&dir, "report.csv");
    ok(&["sweep", "--input", &input, "--grid", &p(&dir, "config.txt"), "--method", "ssa1", "--out", &report]);
    let text = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert!(lines[0].starts_with("method,w,M,tau"));
    let auc_col = lines[0].split(',').position(|c| c == "auc").unwrap();
    let swept: f64 = lines[1].split(',').nth(auc_col).unwrap().parse().unwrap();
    assert!((swept - eval).abs() <= 5e-7, "{swept} vs {eval}");
}

#[test]
fn mds_writes_labelled_points() {
    let dir = setup();
    let model = p(&dir, "model.txt");
    let text = fs::read_to_string(dir.path().join("series.csv")).unwrap();
    let normal: String = text.lines().take(400).map(|l| format!("{l}\n")).collect();
    fs::write(dir.path().join("normal.csv"), normal).unwrap();
    ok(&["train", "--input", &p(&dir, "normal.csv"), "--config", &p(&dir, "config.txt"), "--out", &model]);
    for metric in ["min-angle", "eq4"] {
        let out = p(&dir, "emb.csv");
        ok(&["mds", "--input", &p(&dir, "series.csv"), "--model", &model, "--metric", metric, "--stride", "20", "--out", &out]);
        let emb = fs::read_to_string(&out).unwrap();
        assert!(emb.starts_with("x,y,z,label,time_index\n"));
        assert!(emb.contains(",anomalous,") && emb.contains(",normal,"), "{metric}");
    }
}

fn error_of(out: &Output) -> (i32, String) {
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    (out.status.code().unwrap(), stderr)
}

#[test]
fn failures_exit_with_kind_codes() {
    let dir = setup();
    let (code, msg) = error_of(&dsad(&["eval", "--input", &p(&dir, "series.csv"), "--method", "nope"]));
    assert_eq!(code, 1);
    assert!(msg.starts_with("error kind=usage:"), "{msg}");

    let (code, msg) = error_of(&dsad(&["eval", "--input", &p(&dir, "missing.csv")]));
    assert_eq!(code, 2);
    assert!(msg.starts_with("error kind=data:") && msg.contains("missing.csv"), "{msg}");

    fs::write(dir.path().join("bad.csv"), "1.0\n2.0\nabc\n").unwrap();
    let (code, msg) = error_of(&dsad(&["eval", "--input", &p(&dir, "bad.csv")]));
    assert_eq!(code, 2);
    assert!(msg.contains("line 3"), "{msg}");

    // a pure sine repeating at the lag leaves nothing to learn
    let sine: String = (0..200)
        .map(|n| format!("{}\n", (std::f64::consts::PI * 0.1 * n as f64).sin()))
        .collect();
    fs::write(dir.path().join("sine.csv"), sine).unwrap();
    fs::write(dir.path().join("sine.cfg"), "w = 16\nM = 16\ntau = 20\nsig_dims = 2\n").unwrap();
    let (code, msg) = error_of(&dsad(&[
        "train", "--input", &p(&dir, "sine.csv"), "--config", &p(&dir, "sine.cfg"), "--out", &p(&dir, "m.txt"),
    ]));
    assert_eq!(code, 3, "{msg}");
    assert!(msg.starts_with("error kind=numerical:"), "{msg}");
    assert!(!Path::new(&p(&dir, "m.txt")).exists());
}
