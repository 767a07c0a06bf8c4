//! Command-line contract: exit codes, strict configs, outputs and overrides.
//! Compiled into the acceptance binary so a failing criterion cannot keep
//! these from running.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn pslab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pslab"));
    cmd.args(args).env_remove("PSLAB_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("pslab runs")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("test.conf");
    std::fs::write(&p, text).unwrap();
    p
}

fn run_in(dir: &Path, experiment: &str, config: &Path, extra: &[&str]) -> (Output, PathBuf) {
    let out = dir.join("out");
    let mut args = vec![experiment, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (pslab(&args, &[]), out)
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn usage_errors_exit_two_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("density", "[density]\nwindow = 8\nradii = 1\nlattice = 1, 1\ncolour = red\n"),
        ("density", "[density\n"),
        ("density", "[densty]\nwindow = 8\n"),
        ("density", "[density]\nwindow = eight\nlattice = 1, 1\n"),
        ("density", "[density]\nwindow = 8\nradii = 5\nlattice = 1, 1\n"),
        ("density", "[density]\nwindow = 8\npoints = nowhere.csv\n"),
        ("trace-check", "experiment = density\n"),
        ("trace-check", "[grid]\nn = 64\ndx = 1/4\n[trace-check]\nradii_time = 20\n"),
        ("dual-decay", "[dual-decay]\nrecipe = sinc\n"),
    ];
    for (exp, text) in cases {
        let cfg = write_config(dir.path(), text);
        let (out, outdir) = run_in(dir.path(), exp, &cfg, &[]);
        assert_eq!(out.status.code(), Some(2), "{text:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!outdir.exists(), "{text:?} left outputs behind");
    }
    let cfg = write_config(dir.path(), "");
    assert_eq!(run_in(dir.path(), "no-such-thing", &cfg, &[]).0.status.code(), Some(2));
    assert_eq!(pslab(&["density"], &[]).status.code(), Some(2));
    let missing = dir.path().join("missing.conf");
    assert_eq!(run_in(dir.path(), "density", &missing, &[]).0.status.code(), Some(2));
    assert_eq!(pslab(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn numeric_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    // a Hermite basis has no off-diagonal decay to fit, so the threshold is never exceeded
    let cfg = write_config(
        dir.path(),
        "[grid]\nn = 128\ndx = 1/8\n[dual-decay]\nrecipe = hermite-onb\ncount = 8\ns_threshold = 2\n",
    );
    let (out, outdir) = run_in(dir.path(), "dual-decay", &cfg, &[]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!outdir.exists());
}

#[test]
fn bundled_unit_lattice_has_density_one() {
    let dir = tempfile::tempdir().unwrap();
    let (out, outdir) = run_in(dir.path(), "density", &configs().join("density.conf"), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for r in rows(&outdir.join("density.csv")) {
        let (upper, lower): (f64, f64) = (r[1].parse().unwrap(), r[2].parse().unwrap());
        assert!((upper - 1.0).abs() < 1e-12 && (lower - 1.0).abs() < 1e-12);
    }
}

#[test]
fn trace_check_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "experiment = trace-check\n");
    let (out, outdir) = run_in(dir.path(), "trace-check", &cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let t = rows(&outdir.join("trace_check.csv"));
    assert!(!t.is_empty());
    assert!(t.iter().all(|r| r[4].parse::<f64>().unwrap() < 0.02));
}

#[test]
fn provenance_header_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 5\n[grid]\nn = 256\ndx = 1/16\n[uncertainty-sum]\nrecipe = jittered-gabor\nalpha = 2\nbeta = 2\njitter = 0.2\nextent = 4\n";
    let cfg = write_config(dir.path(), text);
    let (out, outdir) = run_in(dir.path(), "uncertainty-sum", &cfg, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let a = std::fs::read_to_string(outdir.join("ledger.csv")).unwrap();
    assert!(a.starts_with("# pslab "));
    assert!(a.contains("# experiment: uncertainty-sum\n"));
    assert!(a.contains("# seed: 5\n") && a.contains("sha256="));

    let (out, outdir) = run_in(dir.path(), "uncertainty-sum", &cfg, &["--seed", "6"]);
    assert!(out.status.success());
    let b = std::fs::read_to_string(outdir.join("ledger.csv")).unwrap();
    assert!(b.contains("# seed: 6\n"));
    let centers = |s: &str| -> Vec<String> { s.lines().filter(|l| !l.starts_with('#')).map(|l| l.split(',').take(3).collect::<Vec<_>>().join(",")).collect() };
    assert_ne!(centers(&a), centers(&b));
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("fock_sweep.conf");
    let one = dir.path().join("one");
    let default = dir.path().join("default");
    let run = |out: &Path, envs: &[(&str, &str)]| {
        pslab(&["fock-sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], envs)
    };
    assert!(run(&one, &[("PSLAB_THREADS", "1")]).status.success());
    assert!(run(&default, &[]).status.success());
    for f in ["fock_sweep.csv", "fock_drift.csv", "fock_bridge.csv"] {
        assert_eq!(std::fs::read(one.join(f)).unwrap(), std::fs::read(default.join(f)).unwrap());
    }
    assert_eq!(run(&dir.path().join("bad"), &[("PSLAB_THREADS", "zero")]).status.code(), Some(2));
    assert!(!dir.path().join("bad").exists());
}
