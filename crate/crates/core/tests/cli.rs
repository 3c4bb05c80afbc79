use std::fs;
use std::io::BufReader;
use std::process::{Command, Output};

use vpsplit::runner::read_snapshot;

fn vpsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vpsplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SMALL: &[&str] = &["--nx", "32", "--nv", "64", "--tfinal", "2", "--tau", "0.5"];

fn small(extra: &[&str]) -> Vec<String> {
    SMALL.iter().chain(extra).map(|s| s.to_string()).collect()
}

fn run_small(extra: &[&str]) -> Output {
    let args = small(extra);
    vpsplit(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn run_writes_csv_to_stdout() {
    let out = run_small(&[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,H,T,U,mass,L1,L2,fmin,fmax"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[4][0], 2.0);
    assert!(rows.iter().all(|r| r.len() == 9 && (r[1] - r[2] - r[3]).abs() < 1e-12));
    assert!(String::from_utf8_lossy(&out.stderr).contains("err_H"));
}

#[test]
fn runs_are_bitwise_reproducible() {
    let a = run_small(&["--scheme", "o6-11-d1"]);
    let b = run_small(&["--scheme", "o6-11-d1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let csv = dir.path().join("run.csv");
    fs::write(
        &cfg,
        format!(
            "# small test case\nnx = 32\nnv = 64\nscheme = 3jump\ntau = 0.25\ntfinal = 1\nout = {}\n",
            csv.display()
        ),
    )
    .unwrap();
    let out = vpsplit(&["--config", cfg.to_str().unwrap(), "--tau", "0.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&csv).unwrap();
    // the flag overrides the file: two steps of 0.5, not four of 0.25
    assert_eq!(text.lines().count(), 1 + 3);

    fs::write(&cfg, "nx = 32\nbogus = 1\n").unwrap();
    let out = vpsplit(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("final.bin");
    let out = run_small(&["--snapshot", snap.to_str().unwrap()]);
    assert!(out.status.success());
    let bytes = fs::read(&snap).unwrap();
    assert_eq!(bytes.len(), 64 + 8 * 32 * 64);
    let f = read_snapshot(BufReader::new(&bytes[..])).unwrap();
    assert_eq!((f.grid().dim(), f.grid().nx(), f.grid().nv()), (1, 32, 64));
    assert!(f.is_finite());
}

#[test]
fn sweep_and_verify_modes() {
    let out = run_small(&["--mode", "sweep", "--taus", "0.1,0.2,0.5,1.0"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# slope=")));

    let out = vpsplit(&["--mode", "verify"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("all gates passed"));
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

#[test]
fn invalid_input_exit_codes() {
    for args in [
        &["--scheme", "rk4"][..],
        &["--order", "16"],
        &["--dim", "2", "--scheme", "o6-11-d1"],
        &["--tau=-1"],
        &["--tau"],
        &["--nx", "many"],
        &["--amplitude", "1.5"],
        &["--mode", "sweep", "--taus", "0.1,0.2"],
    ] {
        let out = run_small(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}
