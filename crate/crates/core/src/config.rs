//! Line-oriented `key = value` scenario files.
//!
//! ```text
//! # CNOT at the reference regime, physical units
//! preset = reference
//! gate = cnot
//! duration = 21.5 us
//! gamma = 1 kHz
//! ```
//!
//! Angular quantities (`v`, `detuning`, `omega_b`, `defect`,
//! `dipole_deviation`) accept `Hz`, `kHz`, `MHz`, `GHz` (multiplied by 2π),
//! `rad/s`, `rad/us`, or a bare number in rad/s. The decay rate `gamma` is a
//! rate: `kHz` there means 10³ s⁻¹ with no 2π. Times accept `s`, `ms`, `us`,
//! `ns`. Angles accept `rad`, `deg`, or a bare number in radians.
//!
//! Without `preset`, the laboratory parameters apply (`V = 2π×133.04 MHz`,
//! `Ω_b = 2π×4.43 MHz`, `T = 21.5 μs`). A lone `duration` or `v` that differs
//! from the preset switches to the reference scaling `V·T = 18000`, `Ω_b·T = 600`.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::atom::{ModelParams, Stage, REFERENCE_OMEGA_B_T, REFERENCE_VT};
use crate::dynamics::{Method, PropagationConfig, SnrUnit};
use crate::error::{Error, Result};
use crate::pulse::DEFAULT_SAMPLES;
use crate::scenario::{Gate, NoiseSpec, Scenario};

const KNOWN_KEYS: &[&str] = &[
    "preset",
    "gate",
    "v_a",
    "v_b",
    "eta",
    "theta_g",
    "duration",
    "v",
    "v_t",
    "detuning",
    "omega_b",
    "omega_b_t",
    "gamma",
    "defect",
    "dipole_deviation",
    "epsilon",
    "snr",
    "snr_unit",
    "samples",
    "frame",
    "integrator",
    "rtol",
    "atol",
    "max_step",
    "seed",
    "runs",
    "jobs",
    "sweep",
    "sweep_start",
    "sweep_end",
    "sweep_points",
    "trace_points",
    "drive",
    "out",
];

/// Keys that change how a run executes but not what it computes.
const EXECUTION_KEYS: &[&str] = &["jobs", "out"];

/// Raw key/value pairs, keys lower-cased, later lines overriding earlier ones.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
            let key = key.trim().to_ascii_lowercase();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(Error::Config { field: key, message: format!("unknown key on line {}", n + 1) });
            }
            let value = value.trim();
            if value.is_empty() {
                return Err(Error::Config { field: key, message: "empty value".into() });
            }
            entries.insert(key, value.to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), value.into());
    }

    /// Sorted `key = value` lines without the execution-only keys (`jobs`,
    /// `out`); stable input for hashing.
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries.iter().filter(|(k, _)| !EXECUTION_KEYS.contains(&k.as_str())) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// SHA-256 of [`ConfigFile::canonical`], hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn split_unit(value: &str) -> (&str, &str) {
    let v = value.trim();
    match v.find(|c: char| c.is_whitespace()) {
        Some(i) => (v[..i].trim(), v[i..].trim()),
        None => (v, ""),
    }
}

fn number(field: &str, s: &str) -> Result<f64> {
    let x = match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        "pi" => PI,
        other => other
            .parse::<f64>()
            .map_err(|_| Error::Config { field: field.into(), message: format!("`{s}` is not a number") })?,
    };
    if x.is_nan() {
        return Err(Error::Config { field: field.into(), message: "NaN is not allowed".into() });
    }
    Ok(x)
}

/// Angular frequency in rad/s.
pub fn parse_angular(field: &str, value: &str) -> Result<f64> {
    let (num, unit) = split_unit(value);
    let x = number(field, num)?;
    let factor = match unit.to_ascii_lowercase().as_str() {
        "" | "rad/s" => 1.0,
        "rad/ms" => 1e3,
        "rad/us" => 1e6,
        "hz" => TAU,
        "khz" => TAU * 1e3,
        "mhz" => TAU * 1e6,
        "ghz" => TAU * 1e9,
        other => return Err(Error::Config { field: field.into(), message: format!("unknown frequency unit `{other}`") }),
    };
    Ok(x * factor)
}

/// Rate in s⁻¹ (no 2π).
pub fn parse_rate(field: &str, value: &str) -> Result<f64> {
    let (num, unit) = split_unit(value);
    let x = number(field, num)?;
    let factor = match unit.to_ascii_lowercase().as_str() {
        "" | "1/s" | "hz" => 1.0,
        "khz" | "1/ms" => 1e3,
        "mhz" | "1/us" => 1e6,
        other => return Err(Error::Config { field: field.into(), message: format!("unknown rate unit `{other}`") }),
    };
    Ok(x * factor)
}

/// Time in seconds.
pub fn parse_time(field: &str, value: &str) -> Result<f64> {
    let (num, unit) = split_unit(value);
    let x = number(field, num)?;
    let factor = match unit.to_ascii_lowercase().as_str() {
        "" | "s" => 1.0,
        "ms" => 1e-3,
        "us" | "μs" => 1e-6,
        "ns" => 1e-9,
        other => return Err(Error::Config { field: field.into(), message: format!("unknown time unit `{other}`") }),
    };
    Ok(x * factor)
}

/// Angle in radians.
pub fn parse_angle(field: &str, value: &str) -> Result<f64> {
    let (num, unit) = split_unit(value);
    let x = number(field, num)?;
    match unit.to_ascii_lowercase().as_str() {
        "" | "rad" => Ok(x),
        "deg" => Ok(x.to_radians()),
        "pi" => Ok(x * PI),
        other => Err(Error::Config { field: field.into(), message: format!("unknown angle unit `{other}`") }),
    }
}

fn plain(field: &str, value: &str) -> Result<f64> {
    let (num, unit) = split_unit(value);
    if !unit.is_empty() {
        return Err(Error::Config { field: field.into(), message: format!("`{field}` takes no unit") });
    }
    number(field, num)
}

fn count(field: &str, value: &str) -> Result<usize> {
    value
        .trim()
        .parse::<usize>()
        .map_err(|_| Error::Config { field: field.into(), message: format!("`{value}` is not a non-negative integer") })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Epsilon,
    DeltaPrime,
    Defect,
    Gamma,
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epsilon" => Ok(Channel::Epsilon),
            "delta_prime" | "dipole_deviation" => Ok(Channel::DeltaPrime),
            "defect" | "delta" => Ok(Channel::Defect),
            "gamma" => Ok(Channel::Gamma),
            other => Err(Error::Config { field: "sweep".into(), message: format!("unknown channel `{other}`") }),
        }
    }
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Epsilon => "epsilon",
            Channel::DeltaPrime => "delta_prime",
            Channel::Defect => "defect",
            Channel::Gamma => "gamma",
        }
    }

    /// Parses a range endpoint in this channel's units.
    pub fn parse_value(self, field: &str, value: &str) -> Result<f64> {
        match self {
            Channel::Epsilon => plain(field, value),
            Channel::DeltaPrime | Channel::Defect => parse_angular(field, value),
            Channel::Gamma => parse_rate(field, value),
        }
    }

    pub fn apply(self, scenario: &mut Scenario, value: f64) {
        match self {
            Channel::Epsilon => scenario.params.field_scaling = value,
            Channel::DeltaPrime => scenario.params.dipole_deviation = value,
            Channel::Defect => scenario.params.forster_defect = value,
            Channel::Gamma => scenario.params.gamma = value,
        }
    }
}

/// Inclusive uniform range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRange {
    pub channel: Channel,
    pub start: f64,
    pub end: f64,
    pub points: usize,
}

impl SweepRange {
    pub fn new(channel: Channel, start: f64, end: f64, points: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite()) || start > end {
            return Err(Error::Config { field: "sweep_start".into(), message: format!("need start ≤ end, got {start} > {end}") });
        }
        if points == 0 || (points == 1 && start != end) {
            return Err(Error::Config { field: "sweep_points".into(), message: format!("bad point count {points}") });
        }
        Ok(Self { channel, start, end, points })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.end - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| if k + 1 == self.points { self.end } else { self.start + k as f64 * step })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    Full,
    Effective,
}

/// A fully resolved run description.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub gate: Gate,
    pub scenario: Scenario,
    pub seed: u64,
    pub runs: usize,
    pub jobs: Option<usize>,
    pub sweep: Option<SweepRange>,
    pub trace_points: usize,
    pub out: Option<String>,
    pub source: ConfigFile,
}

impl ScenarioConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_file(ConfigFile::parse(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_file(ConfigFile::load(path)?)
    }

    pub fn from_file(file: ConfigFile) -> Result<Self> {
        let get = |k: &str| file.get(k);
        let preset = get("preset").unwrap_or("laboratory").to_ascii_lowercase();
        let gate = match get("gate").unwrap_or("cnot").to_ascii_lowercase().as_str() {
            "cnot" => Gate::Cnot,
            "cz" => Gate::Cz,
            "custom" => {
                let v_a = get("v_a").ok_or_else(|| missing("v_a", "custom gates need v_a"))?;
                let v_b = get("v_b").ok_or_else(|| missing("v_b", "custom gates need v_b"))?;
                Gate::Custom { v_a: parse_angle("v_a", v_a)?, v_b: parse_angle("v_b", v_b)? }
            }
            other => return Err(Error::Config { field: "gate".into(), message: format!("unknown gate `{other}`") }),
        };
        if !matches!(gate, Gate::Custom { .. }) && (get("v_a").is_some() || get("v_b").is_some()) {
            return Err(Error::Config { field: "v_a".into(), message: "angles are only read for gate = custom".into() });
        }

        let mut params = match preset.as_str() {
            "reference" => None,
            "laboratory" => Some(ModelParams::laboratory()),
            other => return Err(Error::Config { field: "preset".into(), message: format!("unknown preset `{other}`") }),
        };
        let duration = get("duration").map(|v| parse_time("duration", v)).transpose()?;
        let v = match (get("v"), get("v_t")) {
            (Some(_), Some(_)) => {
                return Err(Error::Config { field: "v".into(), message: "give either v or v_t, not both".into() })
            }
            (Some(x), None) => Some(Coupling::Absolute(parse_angular("v", x)?)),
            (None, Some(x)) => Some(Coupling::Product(plain("v_t", x)?)),
            (None, None) => None,
        };
        let (duration, v_abs) = match (duration, v, params) {
            (Some(t), Some(Coupling::Absolute(v)), _) => (t, v),
            (Some(t), Some(Coupling::Product(vt)), _) => (t, vt / t),
            (Some(t), None, Some(p)) if same_time(p.duration, t) => (t, p.v),
            (Some(t), None, _) => (t, REFERENCE_VT / t),
            (None, Some(Coupling::Absolute(v)), _) => (REFERENCE_VT / v, v),
            (None, Some(Coupling::Product(_)), _) => {
                return Err(Error::Config { field: "duration".into(), message: "v_t needs a duration".into() })
            }
            (None, None, Some(p)) => (p.duration, p.v),
            (None, None, None) => {
                return Err(Error::Config { field: "duration".into(), message: "give duration, v, or both".into() })
            }
        };
        for (name, x) in [("duration", duration), ("v", v_abs)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Config { field: name.into(), message: format!("must be positive, got {x}") });
            }
        }
        let mut p = params.take().unwrap_or_else(|| ModelParams::reference(duration));
        let lab_scale = same_time(p.duration, duration) && preset == "laboratory";
        p.duration = duration;
        p.v = v_abs;
        p.detuning = match get("detuning") {
            Some(x) => parse_angular("detuning", x)?,
            None => v_abs,
        };
        p.omega_b = match (get("omega_b"), get("omega_b_t")) {
            (Some(_), Some(_)) => {
                return Err(Error::Config { field: "omega_b".into(), message: "give either omega_b or omega_b_t".into() })
            }
            (Some(x), None) => parse_angular("omega_b", x)?,
            (None, Some(x)) => plain("omega_b_t", x)? / duration,
            (None, None) if lab_scale => p.omega_b,
            (None, None) => REFERENCE_OMEGA_B_T / duration,
        };
        let (v_a, v_b) = gate.angles();
        p.v_a = v_a;
        p.v_b = v_b;
        if let Some(x) = get("gamma") {
            p.gamma = parse_rate("gamma", x)?;
        }
        if let Some(x) = get("defect") {
            p.forster_defect = parse_angular("defect", x)?;
        }
        if let Some(x) = get("dipole_deviation") {
            p.dipole_deviation = parse_angular("dipole_deviation", x)?;
        }
        if let Some(x) = get("epsilon") {
            p.field_scaling = plain("epsilon", x)?;
        }
        p.validate().map_err(|e| Error::Config { field: "parameters".into(), message: e.to_string() })?;

        let eta = get("eta").map(|x| plain("eta", x)).transpose()?.unwrap_or(1.0);
        let theta_g = get("theta_g").map(|x| parse_angle("theta_g", x)).transpose()?.unwrap_or(PI);
        let samples = get("samples").map(|x| count("samples", x)).transpose()?.unwrap_or(DEFAULT_SAMPLES);
        if samples < 2 || samples % 4 != 0 {
            return Err(Error::Config { field: "samples".into(), message: "must be a positive multiple of 4".into() });
        }
        let stage = match get("frame").unwrap_or("full") {
            "full" => Stage::Interaction,
            other => other.parse::<Stage>().map_err(|e| Error::Config { field: "frame".into(), message: e.to_string() })?,
        };
        let rtol = get("rtol").map(|x| plain("rtol", x)).transpose()?.unwrap_or(1e-9);
        let atol = get("atol").map(|x| plain("atol", x)).transpose()?.unwrap_or(1e-11);
        let method = match get("integrator").unwrap_or("rk") {
            "rk" => Method::Adaptive { rtol, atol },
            "expm" => {
                let fastest = p.detuning.abs().max(p.interaction().abs());
                let max_step = get("max_step")
                    .map(|x| parse_time("max_step", x))
                    .transpose()?
                    .unwrap_or(2.0 * PI / (40.0 * fastest));
                Method::Magnus { max_step }
            }
            other => {
                return Err(Error::Config { field: "integrator".into(), message: format!("unknown integrator `{other}`") })
            }
        };
        let propagation = PropagationConfig { method, ..PropagationConfig::default() };
        if let Method::Adaptive { rtol, atol } = method {
            if !(rtol > 0.0 && atol > 0.0) {
                return Err(Error::Config { field: "rtol".into(), message: "tolerances must be positive".into() });
            }
        }

        let seed = get("seed").map(|x| count("seed", x).map(|s| s as u64)).transpose()?.unwrap_or(0);
        let noise = match get("snr") {
            None => None,
            Some(x) => {
                let snr = plain("snr", x)?;
                let unit = match get("snr_unit").unwrap_or("db").to_ascii_lowercase().as_str() {
                    "db" => SnrUnit::Decibel,
                    "linear" => SnrUnit::Linear,
                    other => {
                        return Err(Error::Config { field: "snr_unit".into(), message: format!("unknown unit `{other}`") })
                    }
                };
                if unit == SnrUnit::Linear && snr <= 0.0 {
                    return Err(Error::Config { field: "snr".into(), message: "linear SNR must be positive".into() });
                }
                Some(NoiseSpec { snr, unit, seed })
            }
        };
        let runs = get("runs").map(|x| count("runs", x)).transpose()?.unwrap_or(50);
        let jobs = get("jobs").map(|x| count("jobs", x)).transpose()?;
        let trace_points = get("trace_points").map(|x| count("trace_points", x)).transpose()?.unwrap_or(200);
        let sweep = match get("sweep") {
            None => None,
            Some(ch) => {
                let channel: Channel = ch.parse()?;
                let start = get("sweep_start").ok_or_else(|| missing("sweep_start", "required with sweep"))?;
                let end = get("sweep_end").ok_or_else(|| missing("sweep_end", "required with sweep"))?;
                let points = count("sweep_points", get("sweep_points").unwrap_or("21"))?;
                Some(SweepRange::new(
                    channel,
                    channel.parse_value("sweep_start", start)?,
                    channel.parse_value("sweep_end", end)?,
                    points,
                )?)
            }
        };

        let drive_off = match get("drive").unwrap_or("on") {
            "on" => false,
            "off" => true,
            other => return Err(Error::Config { field: "drive".into(), message: format!("expected on or off, got `{other}`") }),
        };
        let scenario = Scenario {
            params: p,
            eta,
            theta_g,
            samples,
            stage,
            propagation,
            noise,
            drive_off,
        };
        Ok(Self {
            gate,
            scenario,
            seed,
            runs,
            jobs,
            sweep,
            trace_points,
            out: get("out").map(str::to_string),
            source: file,
        })
    }

    pub fn frame(&self) -> Frame {
        if self.scenario.stage == Stage::Effective {
            Frame::Effective
        } else {
            Frame::Full
        }
    }

    pub fn hash(&self) -> String {
        self.source.hash()
    }
}

fn same_time(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

enum Coupling {
    Absolute(f64),
    Product(f64),
}

fn missing(field: &str, message: &str) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn parses_units() {
        assert_relative_eq!(parse_angular("v", "133.04 MHz").unwrap(), TAU * 133.04e6);
        assert_relative_eq!(parse_angular("v", "5 rad/us").unwrap(), 5e6);
        assert_relative_eq!(parse_rate("gamma", "1 kHz").unwrap(), 1e3);
        assert_relative_eq!(parse_time("duration", "21.5 us").unwrap(), 21.5e-6);
        assert_relative_eq!(parse_angle("v_a", "90 deg").unwrap(), PI / 2.0);
        assert_relative_eq!(parse_angle("v_a", "0.25 pi").unwrap(), PI / 4.0);
        assert!(parse_angular("v", "3 furlongs").is_err());
        assert!(parse_time("duration", "abc us").is_err());
    }

    #[test]
    fn derives_coupling_from_duration() {
        let c = ScenarioConfig::from_text("duration = 2 us\n").unwrap();
        assert_relative_eq!(c.scenario.params.v * 2e-6, 18000.0, max_relative = 1e-14);
        assert_relative_eq!(c.scenario.params.omega_b * 2e-6, 600.0, max_relative = 1e-14);
        assert_eq!(c.scenario.params.detuning, c.scenario.params.v);
        let c = ScenarioConfig::from_text("v = 1e9\n").unwrap();
        assert_relative_eq!(c.scenario.params.duration, 18e-6, max_relative = 1e-14);
    }

    #[test]
    fn laboratory_preset() {
        let c = ScenarioConfig::from_text("gamma = 1 kHz\n").unwrap();
        assert_eq!(c.scenario.params.v, ModelParams::laboratory().v);
        assert_eq!(c.scenario.params.omega_b, ModelParams::laboratory().omega_b);
        assert_eq!(c.scenario.params.gamma, 1e3);
    }

    #[test]
    fn rejects_bad_input() {
        for (text, field) in [
            ("duration = 1\nfoo = 2\n", "foo"),
            ("gate = toffoli\nduration = 1\n", "gate"),
            ("duration = -1\n", "duration"),
            ("duration = 1\nv = 1\nv_t = 2\n", "v"),
            ("preset = reference\n", "duration"),
            ("duration = 1\ndrive = maybe\n", "drive"),
            ("duration = 1\nsweep = epsilon\nsweep_start = 0.1\nsweep_end = -0.1\n", "sweep_start"),
            ("duration = 1\nsweep = epsilon\nsweep_start = 0\nsweep_end = 1\nsweep_points = 0\n", "sweep_points"),
            ("duration = 1\nsamples = 10\n", "samples"),
            ("duration = 1\nv_a = 1\n", "v_a"),
            ("duration = 1\nframe = sideways\n", "frame"),
        ] {
            match ScenarioConfig::from_text(text) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(ConfigFile::parse("no equals sign"), Err(Error::Parse(_))));
    }

    #[test]
    fn hash_ignores_order_and_comments() {
        let a = ConfigFile::parse("duration = 1\neta = 0.5 # comment\n").unwrap();
        let b = ConfigFile::parse("# header\neta = 0.5\n\nduration = 1\n").unwrap();
        assert_eq!(a.hash(), b.hash());
        let c = ConfigFile::parse("eta = 0.6\nduration = 1\n").unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
        let d = ConfigFile::parse("eta = 0.5\nduration = 1\njobs = 4\nout = /tmp/x\n").unwrap();
        assert_eq!(a.hash(), d.hash());
    }

    #[test]
    fn sweep_values_inclusive() {
        let r = SweepRange::new(Channel::Epsilon, -0.1, 0.1, 21).unwrap();
        let v = r.values();
        assert_eq!(v.len(), 21);
        assert_eq!(v[0], -0.1);
        assert_eq!(v[20], 0.1);
        assert!((v[10]).abs() < 1e-16);
        let c = ScenarioConfig::from_text("duration = 1\nsweep = defect\nsweep_start = -1 MHz\nsweep_end = 1 MHz\nsweep_points = 3\n")
            .unwrap();
        assert_eq!(c.sweep.unwrap().values(), vec![-TAU * 1e6, 0.0, TAU * 1e6]);
    }

    #[test]
    fn custom_gate_and_integrator() {
        let c = ScenarioConfig::from_text("gate = custom\nv_a = 0.5 pi\nv_b = 1 pi\nduration = 1\nintegrator = expm\n").unwrap();
        assert_eq!(c.scenario.params.v_a, PI / 2.0);
        match c.scenario.propagation.method {
            Method::Magnus { max_step } => assert_relative_eq!(max_step, TAU / (40.0 * 18000.0)),
            m => panic!("{m:?}"),
        }
        let c = ScenarioConfig::from_text("duration = 1\nsnr = 10\nseed = 4\nframe = effective\n").unwrap();
        assert_eq!(c.scenario.noise, Some(NoiseSpec { snr: 10.0, unit: SnrUnit::Decibel, seed: 4 }));
        assert_eq!(c.frame(), Frame::Effective);
    }
}
