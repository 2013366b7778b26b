use std::path::Path;
use std::process::{Command, Output};

fn machlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_machlab")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.cfg");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "n = 64\nL = 16\ncutoff_radius = 3\nepsilon = 0.2\nT = 0.2\nsample_dt = 0.1\n";

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn simulate_writes_trajectory_history_and_resolved_config() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), &format!("{SMALL}out_csv = traj.csv\n"));
    let out = d.path().join("out");
    let o = machlab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--seed", "3", "--threads", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("traj.csv")).unwrap();
    assert!(csv.starts_with("t,"));
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(out.join("history.field").exists() && out.join("final.field").exists());
    let resolved = std::fs::read_to_string(out.join("config.resolved")).unwrap();
    assert!(resolved.contains("seed = 3"), "{resolved}");
}

#[test]
fn incompressible_simulate_and_flowmap() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("out");
    let o = machlab(&["simulate", "--incompressible", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(header(&out.join("reference.csv")).starts_with("t,"));
    let o = machlab(&["flowmap", "--config", &cfg, "--out", out.to_str().unwrap(), "--lattice", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let parts = std::fs::read_to_string(out.join("particles.csv")).unwrap();
    assert_eq!(parts.lines().count(), 1 + 3 * 64);
    assert_eq!(header(&out.join("bounds.csv")), "t,lhs,data_norm,div_l1_linf,ll_integral,div_l1_lmo,shape");
}

#[test]
fn norms_rows_carry_the_sampler_hash() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("out");
    let o = machlab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let field = out.join("final.field");
    let o = machlab(&[
        "norms",
        field.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--weight",
        "log:1",
        "--stride",
        "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("norm_name,value,sampler_hash"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4 * 6);
    assert!(rows.iter().all(|r| r.len() == 3 && r[2] == rows[0][2] && r[1].parse::<f64>().is_ok()));
    assert!(rows.iter().any(|r| r[0] == "omega:bmo"));
    assert_eq!(std::fs::read_to_string(out.join("norms.csv")).unwrap(), text);
}

#[test]
fn sweep_and_compare_emit_tables() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), "n = 32\nepsilons = 0.2, 0.1\nT = 0.2\nsample_dt = 0.1\n");
    let out = d.path().join("out");
    let o = machlab(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["trajectories", "reference", "summary", "convergence", "fits", "lifespan"] {
        assert!(out.join(format!("{name}.csv")).exists(), "{name}");
    }
    let o = machlab(&["compare", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let cmp = std::fs::read_to_string(out.join("compare.csv")).unwrap();
    // 2 sample times × 3 q × 2 ε
    assert_eq!(cmp.lines().count(), 1 + 12);
}

#[test]
fn configuration_errors_exit_with_one() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("out");
    for body in ["p = 2.5\n", "epsilons = 0.1, 0.2\n", "bogus = 1\n", "n = 100\n"] {
        let cfg = write_config(d.path(), body);
        let o = machlab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{body}");
    }
    assert_eq!(machlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(machlab(&["simulate", "--config", "/nonexistent/cfg"]).status.code(), Some(1));
}

#[test]
fn blow_up_exits_with_two_and_still_writes_the_report() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), &format!("{SMALL}blowup_threshold = 1e-6\n"));
    let out = d.path().join("out");
    let o = machlab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("trajectory.csv").exists());
}
