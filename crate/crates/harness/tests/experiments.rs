use std::fs;
use std::path::Path;
use std::process::Command;

use whipchain::dynamics::initial::InitialData;
use whipchain::dynamics::{run, IntegratorConfig};
use whipchain_harness::emit::{read_states_jsonl, series_header, write_series_csv, write_snapshots_jsonl};
use whipchain_harness::manifest::{inventory, sha256_hex, Status};
use whipchain_harness::{exit, parse_str, run_experiment, success_code, RunManifest, RunOptions};

fn options(text: &str) -> RunOptions {
    RunOptions {
        config_bytes: text.as_bytes().to_vec(),
        workers: 2,
    }
}

fn run_in(dir: &Path, text: &str) -> whipchain_harness::Outcome {
    let mut cfg = parse_str(text).unwrap();
    cfg.output_dir = dir.to_path_buf();
    run_experiment(&cfg, &options(text)).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let idx = r.headers().unwrap().iter().position(|h| h == name).unwrap();
    r.records().map(|rec| rec.unwrap()[idx].to_string()).collect()
}

#[test]
fn three_snapshots_make_four_csv_lines() {
    let dir = tempfile::tempdir().unwrap();
    let c = InitialData::RigidRotation { omega: 1.0, angle: 0.0 }.generate(8).unwrap();
    let t = run(&c, &IntegratorConfig { t_end: 0.2, report_stride: 1000, ..Default::default() }).unwrap();
    let three = [t.snapshots[0].clone(), t.snapshots[0].clone(), t.last().clone()];
    let path = dir.path().join("s.csv");
    write_series_csv(&path, &three, 3, 3).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(text.lines().next().unwrap().split(',').count(), series_header(3, 3).len());
}

#[test]
fn snapshot_lines_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let c = InitialData::by_name("power_angle").unwrap().generate(12).unwrap();
    let t = run(&c, &IntegratorConfig { t_end: 0.3, report_stride: 5, ..Default::default() }).unwrap();
    let path = dir.path().join("s.jsonl");
    write_snapshots_jsonl(&path, &t.snapshots).unwrap();
    let back = read_states_jsonl(&path).unwrap();
    assert_eq!(back.len(), t.snapshots.len());
    for (a, b) in back.iter().zip(&t.snapshots) {
        assert_eq!(a, &b.state);
    }
}

#[test]
fn empty_trajectory_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("e.csv");
    let json_path = dir.path().join("e.jsonl");
    assert!(write_series_csv(&csv_path, &[], 3, 3).is_err());
    assert!(write_snapshots_jsonl(&json_path, &[]).is_err());
    assert!(!csv_path.exists() && !json_path.exists());
}

const RUN: &str = "kind = \"run\"\nn = [8, 16]\n[initial_data]\ngenerator = \"power_angle\"\n[integrator]\nt_end = 0.2\n";

#[test]
fn runs_are_deterministic_and_fully_listed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_in(a.path(), RUN);
    run_in(b.path(), RUN);
    for name in ["series_n8.csv", "series_n16.csv", "series_n8.jsonl", "series_n16.jsonl"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let m = RunManifest::read(a.path()).unwrap();
    assert_eq!(m, first.manifest);
    assert_eq!(m.status, Status::Complete);
    assert_eq!(m.config_sha256, sha256_hex(RUN.as_bytes()));
    assert_eq!(m.files, inventory(a.path()).unwrap());
    let listed: Vec<&str> = m.files.iter().map(|f| f.path.as_str()).collect();
    let mut on_disk: Vec<String> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.json")
        .collect();
    on_disk.sort();
    assert_eq!(listed, on_disk);
    assert!(m.finished >= m.started);
    assert_eq!(m.terminations, vec!["n=8: t_end_reached", "n=16: t_end_reached"]);
}

#[test]
fn worker_count_does_not_change_output() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let text = "kind = \"green_certify\"\nn = [4, 8, 16]\nseeds = [1, 2]\nformats = [\"csv\"]\n[suite]\nsamples = 50\n";
    let mut cfg = parse_str(text).unwrap();
    cfg.output_dir = a.path().to_path_buf();
    run_experiment(&cfg, &RunOptions { config_bytes: vec![], workers: 1 }).unwrap();
    cfg.output_dir = b.path().to_path_buf();
    run_experiment(&cfg, &RunOptions { config_bytes: vec![], workers: 4 }).unwrap();
    let name = "green_certify.csv";
    assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap());
}

#[test]
fn rigid_rotation_convergence_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"convergence\"\nn = [16, 32, 64]\nformats = [\"csv\", \"jsonl\"]\n\
                [initial_data]\ngenerator = \"rigid_rotation\"\n[integrator]\nt_end = 0.5\n";
    run_in(dir.path(), text);
    let errors: Vec<f64> =
        csv_column(&dir.path().join("convergence.csv"), "error_vs_finest").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(errors.len(), 3);
    assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    assert_eq!(fs::read_to_string(dir.path().join("convergence.jsonl")).unwrap().lines().count(), 3);
}

#[test]
fn inequality_suite_finds_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"inequality_suite\"\nn = [4, 16, 64]\nformats = [\"csv\"]\n\
                [suite]\nsamples = 10000\nr = [0.5, 1.0, 1.5, 2.0]\n";
    let out = run_in(dir.path(), text);
    assert_eq!(out.manifest.violations, 0);
    assert_eq!(success_code(&out), exit::SUCCESS);
    let path = dir.path().join("inequality_suite.csv");
    let names = csv_column(&path, "inequality");
    let trials = csv_column(&path, "trials");
    let endpoint: usize = names
        .iter()
        .zip(&trials)
        .filter(|(n, _)| ["pointwise", "hardy", "boundary"].contains(&n.as_str()))
        .map(|(_, t)| t.parse::<usize>().unwrap())
        .sum();
    assert_eq!(endpoint, 10_000 * 3 * 4 * 3);
}

#[test]
fn green_certificates_pass_on_positive_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"green_certify\"\nn = [4, 16, 64]\nformats = [\"csv\"]\n[suite]\nsamples = 1000\n";
    let out = run_in(dir.path(), text);
    assert_eq!(out.manifest.violations, 0);
    let path = dir.path().join("green_certify.csv");
    for (samples, checked) in csv_column(&path, "samples").iter().zip(csv_column(&path, "upper_checked")) {
        assert_eq!(samples, "1000");
        assert_eq!(checked, "1000");
    }
}

#[test]
fn blowup_hunt_reports_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let text = "kind = \"blowup_hunt\"\nn = 64\nformats = [\"csv\"]\n[integrator]\nt_end = 3.0\n";
    run_in(dir.path(), text);
    let t_est: f64 = csv_column(&dir.path().join("blowup_hunt.csv"), "t_est")[0].parse().unwrap();
    assert!(t_est.is_finite());
    assert!(dir.path().join("blowup_series_n64.csv").exists());
}

#[test]
fn violations_map_to_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut out = run_in(dir.path(), "kind = \"green_certify\"\nn = 4\nformats = [\"csv\"]\n[suite]\nsamples = 5\n");
    out.manifest.violations = 2;
    assert_eq!(success_code(&out), exit::VIOLATIONS);
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_whipchain")).args(args).output().unwrap()
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();

    let good = write("good.toml", RUN);
    let ok = cli(&["run", &good, "--output-dir", out_dir, "--workers", "2", "--seed", "7", "--quiet"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    assert!(ok.stdout.is_empty());
    assert!(Path::new(out_dir).join("manifest.json").exists());

    let bad = write("bad.toml", "kind = \"run\"\nn = 8\ngravty = 1\n");
    let e = cli(&["run", &bad, "--output-dir", out_dir]);
    assert_eq!(e.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&e.stderr).contains("gravty"));

    let numeric = write("fold.toml", "kind = \"run\"\nn = 8\n[initial_data]\ngenerator = \"folded\"\nfold = 2.0\n");
    let failed_dir = dir.path().join("failed");
    let e = cli(&["run", &numeric, "--output-dir", failed_dir.to_str().unwrap()]);
    assert_eq!(e.status.code(), Some(3));
    let m = RunManifest::read(&failed_dir).unwrap();
    assert_eq!(m.status, Status::Incomplete);
    assert!(m.error.unwrap().contains("fold"));
}
