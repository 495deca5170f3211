//! End-to-end tests of the binary: report contents, CSV shape and
//! determinism, sidecar metadata, and subcommand behavior not already
//! covered by the acceptance exit-code matrix.

mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_privacy-contracts")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(bin());
    for a in args {
        cmd.arg(a.as_ref());
    }
    cmd.output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn solve_prints_closed_form_values() {
    let out = run(&[&"solve", &"--config", &data("norisk.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("second-best (risk off)"));
    assert!(text.contains("x = 0.222222"), "x_L* missing:\n{text}");
    assert!(text.contains("t = 1.111111"), "t_H* missing:\n{text}");
    assert!(!text.contains("risk on"));
}

#[test]
fn solve_risk_config_prints_both_sections() {
    let out = run(&[&"solve", &"--config", &data("reference.toml")]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for section in [
        "first-best (risk off)",
        "second-best (risk off)",
        "first-best (risk on)",
        "second-best (risk on)",
    ] {
        assert!(text.contains(section), "missing {section:?}:\n{text}");
    }
    assert!(text.contains("t = 0.156666"), "risk t_L* missing:\n{text}");
}

#[test]
fn zero_m_breach_solves_like_no_risk() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("zero_m.toml");
    let text = std::fs::read_to_string(data("norisk.toml")).unwrap().replace(
        "kind = \"none\"",
        "kind = \"linear_breach\"\nm = 0.0\nloss_low = 0.2\nloss_high = 0.6",
    );
    std::fs::write(&cfg, text).unwrap();
    let a = run(&[&"solve", &"--config", &cfg]);
    let b = run(&[&"solve", &"--config", &data("norisk.toml")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn sweep_stdout_rows_and_values() {
    let out = run(&[&"sweep", &"--config", &data("reference.toml"), &"--grid", &"0.05,0.95,19"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 19 * 2 * 2);
    assert_eq!(lines[0], "p,regime,risk,x_L,x_H,t_L,t_H,rent,profit,welfare,boundary_L,boundary_H");
    let profit_025 = lines
        .iter()
        .find(|l| l.starts_with("0.250000000000,second_best,off"))
        .unwrap()
        .split(',')
        .nth(8)
        .unwrap();
    assert_eq!(profit_025, "0.222222222222");
}

#[test]
fn sweep_file_output_is_deterministic_with_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a.csv"), tmp.path().join("b.csv"));
    for (out, jobs) in [(&a, "1"), (&b, "4")] {
        let r = run(&[
            &"sweep", &"--config", &data("reference.toml"),
            &"--grid", &"0.1,0.9,17", &"--out", out, &"--jobs", &jobs,
        ]);
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let meta = std::fs::read_to_string(tmp.path().join("a.meta")).unwrap();
    assert!(meta.contains("rows = 68"), "{meta}");
    assert!(!std::fs::read_to_string(&a).unwrap().contains("meta"));
}

#[test]
fn sweep_without_grid_is_a_usage_error() {
    let out = run(&[&"sweep", &"--config", &data("norisk.toml")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_accepts_the_solvers_own_menu() {
    let menu = common::reference_dlc(0.25).closed_form_second_best(true).unwrap().menu;
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("own.menu");
    std::fs::write(
        &path,
        format!("{:.15} {:.15}\n{:.15} {:.15}\n", menu.low.x, menu.low.t, menu.high.x, menu.high.t),
    )
    .unwrap();
    let out = run(&[&"verify", &"--config", &data("reference.toml"), &path]);
    let text = stdout(&out);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("verdict: feasible"));
    for name in ["ir_low", "ic_high"] {
        let line = text.lines().find(|l| l.trim_start().starts_with(name)).unwrap();
        let v: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
        assert!(v.abs() <= 1e-9, "{name} not binding: {line}");
    }
}

#[test]
fn compare_reports_thresholds_and_orderings() {
    let out = run(&[
        &"compare", &"--config", &data("reference.toml"),
        &"--oracle", &"--oracle-steps", &"801",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("p_bar   = 0.333333333333"), "{text}");
    for (name, want) in [("p_hat*", 0.5), ("p*", 1.1 / 2.3)] {
        let line = text.lines().find(|l| l.trim_start().starts_with(name)).unwrap();
        let v: f64 = line.split('=').nth(1).unwrap().trim().parse().unwrap();
        assert!((v - want).abs() <= 1e-6, "{name}: {line}");
    }
    assert!(text.contains("prop1_x_high   PASS"), "{text}");
    assert!(text.contains("prop2_x_low    PASS"), "{text}");
    assert!(text.contains("oracle certification (801 steps)"), "{text}");
    assert!(text.contains("(ok)"), "{text}");
}
