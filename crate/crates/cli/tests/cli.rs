use std::path::Path;
use std::process::{Command, Output};

fn clonecast(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clonecast")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn csv_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    (header, lines.map(|l| l.split(',').map(String::from).collect()).collect())
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["scan", "--variant", "XYZ"][..],
        &["scan", "--variant", "OSIL", "--step", "0.6"],
        &["scan", "--variant", "OSIL", "--lambda", "0.1"],
        &["scan", "--variant", "NOSDL", "--lambda", "0.4", "--mu", "0.9"],
        &["scan", "--variant", "OSIL", "--pairing", "vertical"],
        &["verify", "--trials", "0"],
        &["feasibility", "--lambda", "0.5:0:0.1"],
        &["feasibility", "--mu", "0:2:0.5"],
        &["optimize", "--mode", "local", "--z", "2"],
        &["optimize", "--mode", "nonlocal", "--z", "0.7"],
        &["optimize", "--kind", "diagonal"],
        &["nonsense"],
    ] {
        assert_eq!(code(&clonecast(args)), 2, "{args:?}");
    }
}

#[test]
fn unwritable_path_exits_three() {
    let o = clonecast(&["scan", "--variant", "OSIL", "--step", "0.5", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn osil_scan_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("osil.csv");
    let o = clonecast(&["scan", "--variant", "OSIL", "--step", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(
        header.join(","),
        "c1,c2,c3,variant,valid_bds,local_separable,nonlocal_inseparable,broadcast,min_pt_local,min_pt_nonlocal"
    );
    assert_eq!(rows.len(), 21 * 21 * 21);
    let summary = stdout(&o);
    let fraction: f64 = summary.trim().rsplit("fraction=").next().unwrap().parse().unwrap();
    assert!(fraction > 0.0 && fraction < 1.0, "{summary}");
    for r in &rows {
        if r[7] == "true" {
            assert!(r[4] == "true" && r[5] == "true" && r[6] == "true");
        }
        if r[4] == "false" {
            assert!(r[8].is_empty() && r[9].is_empty());
        }
    }
}

#[test]
fn json_scan_parses() {
    let o = clonecast(&["scan", "--variant", "osinl", "--step", "0.5", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 125);
    assert_eq!(v[0]["variant"], "OSINL");
}

#[test]
fn scans_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = clonecast(&["scan", "--variant", "NOSDL", "--step", "0.2", "--pairing", "horizontal", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
}

#[test]
fn overrides_change_the_machine() {
    let base = clonecast(&["scan", "--variant", "OSDL", "--step", "0.25"]);
    let tweak = clonecast(&["scan", "--variant", "OSDL", "--step", "0.25", "--d", "0.2"]);
    assert_eq!(code(&tweak), 0);
    assert_ne!(base.stdout, tweak.stdout);
}

#[test]
fn feasibility_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = clonecast(&["feasibility", "-m", "4", "--lambda", "0:0.1667:0.001", "--mu", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let (header, rows) = csv_rows(&out);
    assert_eq!(&header[..4], ["lambda", "mu", "feasible", "si_compatible"]);
    assert!(rows.iter().all(|r| r[3] == "false"));

    let o = clonecast(&["feasibility", "-m", "2", "--lambda", "0.25", "--mu", "0.5"]);
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let max_mu: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
    assert!((max_mu - 0.5f64.sqrt()).abs() < 1e-9);

    let o = clonecast(&["feasibility", "-m", "3", "--lambda", "0.2", "--mu", "0.4"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("0.2,0.4,true,true"));
}

#[test]
fn verify_passes_and_writes_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("d.log");
    let o = clonecast(&["verify", "--seed", "42", "--trials", "100", "--out", log.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let text = stdout(&o);
    assert_eq!(text.matches(" PASS ").count(), 5);
    assert!(text.contains("10000 states"));
    let lines = std::fs::read_to_string(&log).unwrap();
    assert_eq!(lines.lines().count(), 700);

    let again = dir.path().join("e.log");
    clonecast(&["verify", "--seed", "42", "--trials", "100", "--out", again.to_str().unwrap()]);
    assert_eq!(std::fs::read(&log).unwrap(), std::fs::read(&again).unwrap());
}

fn optimize(args: &[&str]) -> Vec<Vec<String>> {
    let o = clonecast(&[&["optimize"][..], args].concat());
    assert_eq!(code(&o), 0);
    stdout(&o).lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn optimizer_examples() {
    let rows = optimize(&["--mode", "local", "--kind", "orthogonal", "--z", "0,0.2,0.4,0.6,0.8,1.0,1.2,1.4,pi/2"]);
    let curve: Vec<f64> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(curve.windows(2).all(|w| w[1] <= w[0] + 1e-12), "{curve:?}");

    let rows = optimize(&["--mode", "nonlocal", "--kind", "orthogonal", "--z", "0"]);
    assert!(rows[0][6].parse::<f64>().unwrap() <= 0.12);

    let rows = optimize(&["--mode", "nonlocal", "--z", "0.3"]);
    assert_eq!(rows[0][1], "orthogonal");
    assert!(rows[0][6].parse::<f64>().unwrap() <= rows[1][6].parse::<f64>().unwrap());
}
