//! Parameter sweeps and noise Monte Carlo, run in parallel with results kept
//! in input order so output files do not depend on scheduling.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Channel, SweepRange};
use crate::dynamics::SnrUnit;
use crate::error::{Error, Result};
use crate::scenario::{NoiseSpec, Scenario};

pub const SWEEP_CSV_HEADER: &str = "index,channel,value,fidelity,infidelity,status";
pub const MONTECARLO_CSV_HEADER: &str = "index,seed,snr,fidelity,infidelity,status";

/// One evaluated point. A failed point keeps its error text and the sweep
/// carries on.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub value: f64,
    pub seed: Option<u64>,
    pub fidelity: Option<f64>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl Row {
    pub fn infidelity(&self) -> Option<f64> {
        self.fidelity.map(|f| 1.0 - f)
    }

    fn status(&self) -> String {
        match &self.error {
            None => "ok".into(),
            Some(e) => format!("\"error: {}\"", e.replace('"', "'")),
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.12e}")).unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub package: &'static str,
    pub version: &'static str,
}

pub const VERSIONS: Versions = Versions { package: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") };

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub kind: &'static str,
    pub config_hash: String,
    pub versions: Versions,
    pub wall_time: f64,
    pub rows: Vec<Row>,
}

impl Manifest {
    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub channel: Channel,
    pub rows: Vec<Row>,
    pub wall_time: f64,
}

impl SweepResult {
    pub fn csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.12e},{},{},{}",
                r.index,
                self.channel.name(),
                r.value,
                fmt_opt(r.fidelity),
                fmt_opt(r.infidelity()),
                r.status()
            );
        }
        out
    }

    pub fn manifest(&self, config_hash: &str) -> Manifest {
        Manifest {
            kind: "sweep",
            config_hash: config_hash.to_string(),
            versions: VERSIONS,
            wall_time: self.wall_time,
            rows: self.rows.clone(),
        }
    }

    /// Smallest fidelity among successful rows.
    pub fn floor(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.fidelity).reduce(f64::min)
    }
}

/// Fidelity used by sweeps: closed gate fidelity when `γ = 0`, otherwise the
/// master-equation average fidelity.
pub fn evaluate(scenario: &Scenario) -> Result<f64> {
    if scenario.params.gamma > 0.0 {
        Ok(scenario.run_open()?.fidelity)
    } else {
        Ok(scenario.run_gate()?.fidelity)
    }
}

fn pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            return Err(Error::Config { field: "jobs".into(), message: "must be at least 1".into() });
        }
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Integrator(format!("thread pool: {e}")))
}

fn run_rows<F>(items: Vec<(f64, Option<u64>)>, jobs: Option<usize>, eval: F) -> Result<Vec<Row>>
where
    F: Fn(f64, Option<u64>) -> Result<f64> + Sync,
{
    let pool = pool(jobs)?;
    Ok(pool.install(|| {
        items
            .into_par_iter()
            .enumerate()
            .map(|(index, (value, seed))| {
                let start = Instant::now();
                let res = eval(value, seed);
                let seconds = start.elapsed().as_secs_f64();
                match res {
                    Ok(f) => Row { index, value, seed, fidelity: Some(f), error: None, seconds },
                    Err(e) => Row { index, value, seed, fidelity: None, error: Some(e.to_string()), seconds },
                }
            })
            .collect()
    }))
}

pub fn run_sweep(base: &Scenario, range: &SweepRange, jobs: Option<usize>) -> Result<SweepResult> {
    let start = Instant::now();
    let items = range.values().into_iter().map(|v| (v, None)).collect();
    let rows = run_rows(items, jobs, |value, _| {
        let mut s = base.clone();
        range.channel.apply(&mut s, value);
        evaluate(&s)
    })?;
    Ok(SweepResult { channel: range.channel, rows, wall_time: start.elapsed().as_secs_f64() })
}

#[derive(Clone, Debug)]
pub struct MonteCarloResult {
    pub snr: f64,
    pub unit: SnrUnit,
    pub rows: Vec<Row>,
    pub wall_time: f64,
}

impl MonteCarloResult {
    /// Mean infidelity over successful runs.
    pub fn mean_infidelity(&self) -> Option<f64> {
        let v: Vec<f64> = self.rows.iter().filter_map(Row::infidelity).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// Sample standard deviation of the infidelity.
    pub fn std_infidelity(&self) -> Option<f64> {
        let v: Vec<f64> = self.rows.iter().filter_map(Row::infidelity).collect();
        if v.len() < 2 {
            return None;
        }
        let m = v.iter().sum::<f64>() / v.len() as f64;
        Some((v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt())
    }

    pub fn csv(&self) -> String {
        let mut out = String::from(MONTECARLO_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.index,
                r.seed.unwrap_or_default(),
                self.snr,
                fmt_opt(r.fidelity),
                fmt_opt(r.infidelity()),
                r.status()
            );
        }
        out
    }

    pub fn manifest(&self, config_hash: &str) -> Manifest {
        Manifest {
            kind: "montecarlo",
            config_hash: config_hash.to_string(),
            versions: VERSIONS,
            wall_time: self.wall_time,
            rows: self.rows.clone(),
        }
    }
}

/// `runs` noisy realisations with seeds `seed, seed + 1, …`.
pub fn run_montecarlo(
    base: &Scenario,
    snr: f64,
    unit: SnrUnit,
    runs: usize,
    seed: u64,
    jobs: Option<usize>,
) -> Result<MonteCarloResult> {
    if runs == 0 {
        return Err(Error::Config { field: "runs".into(), message: "must be at least 1".into() });
    }
    let start = Instant::now();
    let items = (0..runs as u64).map(|k| (snr, Some(seed + k))).collect();
    let rows = run_rows(items, jobs, |snr, seed| {
        let mut s = base.clone();
        s.noise = Some(NoiseSpec { snr, unit, seed: seed.unwrap_or_default() });
        evaluate(&s)
    })?;
    Ok(MonteCarloResult { snr, unit, rows, wall_time: start.elapsed().as_secs_f64() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atom::Stage;
    use crate::scenario::Gate;

    fn cheap() -> Scenario {
        let mut s = Scenario::reference(Gate::Cnot, 1.0);
        s.stage = Stage::Effective;
        s
    }

    #[test]
    fn sweep_is_ordered_and_reproducible() {
        let range = SweepRange::new(Channel::Epsilon, -0.1, 0.1, 5).unwrap();
        let a = run_sweep(&cheap(), &range, Some(2)).unwrap();
        let b = run_sweep(&cheap(), &range, Some(1)).unwrap();
        assert_eq!(a.csv(), b.csv());
        assert!(a.rows.iter().enumerate().all(|(k, r)| r.index == k && r.error.is_none()));
        assert!(a.csv().starts_with(SWEEP_CSV_HEADER));
        // The pulse is robust: the centre point is the best.
        let f: Vec<f64> = a.rows.iter().map(|r| r.fidelity.unwrap()).collect();
        assert!(f[2] >= f[0] && f[2] >= f[4]);
        assert_eq!(a.floor(), f.iter().copied().reduce(f64::min));
    }

    #[test]
    fn failed_points_are_recorded() {
        // Rate channel with a negative decay rate fails validation at that row only.
        let range = SweepRange::new(Channel::Gamma, -1.0, 0.0, 2).unwrap();
        let r = run_sweep(&cheap(), &range, None).unwrap();
        assert!(r.rows[0].error.is_some());
        assert!(r.rows[1].fidelity.is_some());
        assert!(r.csv().contains("error:"));
    }

    #[test]
    fn montecarlo_seeds_are_independent() {
        let r = run_montecarlo(&cheap(), 10.0, SnrUnit::Decibel, 3, 7, Some(2)).unwrap();
        let seeds: Vec<_> = r.rows.iter().map(|r| r.seed.unwrap()).collect();
        assert_eq!(seeds, vec![7, 8, 9]);
        let f: Vec<_> = r.rows.iter().map(|r| r.fidelity.unwrap()).collect();
        assert!(f[0] != f[1] && f[1] != f[2]);
        assert!(r.mean_infidelity().unwrap() > 0.0);
        assert!(r.std_infidelity().unwrap() > 0.0);
        let again = run_montecarlo(&cheap(), 10.0, SnrUnit::Decibel, 3, 7, Some(1)).unwrap();
        assert_eq!(r.csv(), again.csv());
    }

    #[test]
    fn manifest_serializes() {
        let range = SweepRange::new(Channel::Epsilon, 0.0, 0.0, 1).unwrap();
        let r = run_sweep(&cheap(), &range, Some(1)).unwrap();
        let m = r.manifest("abc");
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        m.write_json(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["config_hash"], "abc");
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
        assert!(v["wall_time"].as_f64().unwrap() >= 0.0);
    }
}
