use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, Output};

use rydberg_nhqc::config::ScenarioConfig;

fn nhqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhqc")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn design_writes_pulse_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d");
    let o = nhqc(&["design", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("pulse.csv")).unwrap();
    assert!(csv.starts_with("t,omega_x,omega_y,omega_a,phi_a,mu1,mu2\n"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("design.json")).unwrap()).unwrap();
    assert!((v["omega_max_t"].as_f64().unwrap() / 36.05 - 1.0).abs() < 0.005);
    // Ω_max ≈ 2π × 0.27 MHz at T = 21.5 μs.
    assert!((v["omega_max"].as_f64().unwrap() / (TAU * 0.27e6) - 1.0).abs() < 0.02);
    assert!(v["q_s"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "eta = fast\n");
    let o = nhqc(&["--config", &bad, "design", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`eta`"));
    let o = nhqc(&["--config", "/nonexistent/x.cfg", "design"]);
    assert_eq!(o.status.code(), Some(2));
    let o = nhqc(&["sweep", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.cfg", "preset = reference\nduration = 1\nframe = effective\n");
    let run = |jobs: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = nhqc(&[
            "--config", &cfg, "--jobs", jobs, "sweep", "--channel", "epsilon", "--start", "-0.1", "--end", "0.1",
            "--points", "7", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("1", "a");
    let b = run("3", "b");
    let csv_a = std::fs::read_to_string(a.join("sweep.csv")).unwrap();
    assert_eq!(csv_a, std::fs::read_to_string(b.join("sweep.csv")).unwrap());
    assert_eq!(csv_a.lines().count(), 8);
    let ma: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    let mb: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(b.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(ma["config_hash"], mb["config_hash"]);
    assert_eq!(ma["rows"].as_array().unwrap().len(), 7);
}

#[test]
fn montecarlo_without_noise_repeats_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.cfg", "preset = reference\nduration = 1\nframe = effective\n");
    let out = dir.path().join("mc");
    let o = nhqc(&["--config", &cfg, "montecarlo", "--snr", "inf", "--runs", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("montecarlo.csv")).unwrap();
    let infid: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(infid.len(), 3);
    assert!(infid.iter().all(|x| *x == infid[0]));

    let noisy = |seed: &str, sub: &str| {
        let out = dir.path().join(sub);
        let o = nhqc(&[
            "--config", &cfg, "--seed", seed, "montecarlo", "--snr", "10", "--runs", "2", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        std::fs::read_to_string(out.join("montecarlo.csv")).unwrap()
    };
    assert_eq!(noisy("5", "n1"), noisy("5", "n2"));
    assert_ne!(noisy("5", "n1"), noisy("6", "n3"));
}

#[test]
fn phases_and_truthtable_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "e.cfg", "preset = reference\nduration = 1\n");
    let out = dir.path().join("p");
    let o = nhqc(&["--config", &cfg, "--frame", "effective", "phases", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("phases.json")).unwrap()).unwrap();
    assert!(v["theta2"].as_f64().unwrap().abs() < 1e-6);
    assert!((v["big_theta2"].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-6);
    assert!(std::fs::read_to_string(out.join("phases.csv")).unwrap().starts_with("t,theta2,Theta2\n"));

    let out = dir.path().join("t");
    let o = nhqc(&["--config", &cfg, "--frame", "effective", "truthtable", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let txt = std::fs::read_to_string(out.join("truth_table.txt")).unwrap();
    assert_eq!(txt.lines().count(), 5);
    assert!(std::fs::read_to_string(out.join("truth_table.csv")).unwrap().starts_with("input,p00,p01,p10,p11\n"));
}

#[test]
fn physical_and_dimensionless_configs_agree() {
    let physical = ScenarioConfig::from_text(
        "preset = reference\nduration = 21.5 us\nv = 133.04 MHz\nomega_b = 4.43 MHz\n",
    )
    .unwrap();
    let t = 21.5e-6;
    let vt = TAU * 133.04e6 * t;
    let obt = TAU * 4.43e6 * t;
    let scaled = ScenarioConfig::from_text(&format!("duration = 1\nv_t = {vt:.17e}\nomega_b_t = {obt:.17e}\n")).unwrap();
    let a = physical.scenario.run_gate().unwrap().fidelity;
    let b = scaled.scenario.run_gate().unwrap().fidelity;
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}
