use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use rydberg_nhqc::config::{Channel, ConfigFile, ScenarioConfig, SweepRange};
use rydberg_nhqc::dynamics::SnrUnit;
use rydberg_nhqc::metrics::accumulated_phases;
use rydberg_nhqc::pulse::{sensitivity_closed_form, sensitivity_quadrature};
use rydberg_nhqc::scenario::{minimum_populations, superposition_input};
use rydberg_nhqc::sweep::{run_montecarlo, run_sweep, VERSIONS};
use rydberg_nhqc::Error;

#[derive(Parser)]
#[command(name = "nhqc", version, about = "Holonomic Rydberg gate design and simulation")]
struct Cli {
    /// Scenario file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    frame: Option<FrameArg>,
    #[arg(long, global = true, value_enum)]
    integrator: Option<IntegratorArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FrameArg {
    Full,
    Effective,
}

#[derive(Clone, Copy, ValueEnum)]
enum IntegratorArg {
    Rk,
    Expm,
}

#[derive(Subcommand)]
enum Command {
    /// Build the pulse and report Ω_max and the error sensitivity.
    Design,
    /// Propagate one gate and write fidelity, population and phase traces.
    Simulate,
    /// Scan one error channel over a range.
    Sweep {
        #[arg(long)]
        channel: Option<String>,
        /// Range start, with units (e.g. "-15 MHz").
        #[arg(long, allow_hyphen_values = true)]
        start: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        end: Option<String>,
        #[arg(long)]
        points: Option<usize>,
    },
    /// Repeat the gate under seeded control noise.
    Montecarlo {
        #[arg(long, allow_hyphen_values = true)]
        snr: Option<f64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, value_parser = ["db", "linear"])]
        snr_unit: Option<String>,
    },
    /// Write the computational-basis transfer table.
    Truthtable,
    /// Dynamic and geometric phases of the cyclic state.
    Phases,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Parse(_) | Error::InvalidParameter(_) => 2,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let mut file = match &cli.config {
        Some(p) => ConfigFile::load(p).map_err(|e| match e {
            Error::Io(m) => Error::Config { field: "--config".into(), message: m },
            other => other,
        })?,
        None => ConfigFile::default(),
    };
    if let Some(s) = cli.seed {
        file.set("seed", s.to_string());
    }
    if let Some(j) = cli.jobs {
        file.set("jobs", j.to_string());
    }
    if let Some(f) = cli.frame {
        file.set("frame", match f {
            FrameArg::Full => "full",
            FrameArg::Effective => "effective",
        });
    }
    if let Some(i) = cli.integrator {
        file.set("integrator", match i {
            IntegratorArg::Rk => "rk",
            IntegratorArg::Expm => "expm",
        });
    }
    match &cli.command {
        Command::Sweep { channel, start, end, points } => {
            for (key, v) in [("sweep", channel), ("sweep_start", start), ("sweep_end", end)] {
                if let Some(v) = v {
                    file.set(key, v.clone());
                }
            }
            if let Some(p) = points {
                file.set("sweep_points", p.to_string());
            }
        }
        Command::Montecarlo { snr, runs, snr_unit } => {
            if let Some(s) = snr {
                file.set("snr", s.to_string());
            }
            if let Some(r) = runs {
                file.set("runs", r.to_string());
            }
            if let Some(u) = snr_unit {
                file.set("snr_unit", u.clone());
            }
        }
        _ => {}
    }
    let config = ScenarioConfig::from_file(file)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out)?;
    let start = Instant::now();
    let summary = match cli.command {
        Command::Design => design(&config, &out)?,
        Command::Simulate => simulate(&config, &out)?,
        Command::Sweep { .. } => sweep(&config, &out)?,
        Command::Montecarlo { .. } => montecarlo(&config, &out)?,
        Command::Truthtable => truthtable(&config, &out)?,
        Command::Phases => phases(&config, &out)?,
    };
    if let Some((name, mut value)) = summary {
        value["config_hash"] = json!(config.hash());
        value["versions"] = json!(VERSIONS);
        value["wall_time"] = json!(start.elapsed().as_secs_f64());
        write_json(&out.join(name), &value)?;
    }
    Ok(())
}

type Summary = Option<(&'static str, Value)>;

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

fn design(config: &ScenarioConfig, out: &Path) -> Result<Summary, Error> {
    let s = &config.scenario;
    let trajectory = s.trajectory()?;
    let schedule = trajectory.schedule(s.samples)?;
    schedule.write_csv(create(&out.join("pulse.csv"))?)?;
    let t = s.params.duration;
    let qs = sensitivity_closed_form(s.eta);
    let qs_quad = sensitivity_quadrature(&trajectory, s.samples)?;
    let warnings = s.params.regime_warnings(schedule.omega_max);
    println!("T          = {t:.6e} s");
    println!("eta        = {}", s.eta);
    println!("Omega_max  = {:.6e} rad/s  ({:.4} MHz × 2π)", schedule.omega_max, schedule.omega_max / (2e6 * std::f64::consts::PI));
    println!("Omega_max·T = {:.4}", schedule.omega_max * t);
    println!("q_s        = {qs:.6e}  (quadrature {qs_quad:.6e})");
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    Ok(Some((
        "design.json",
        json!({
            "command": "design",
            "duration": t,
            "eta": s.eta,
            "omega_max": schedule.omega_max,
            "omega_max_t": schedule.omega_max * t,
            "q_s": qs,
            "q_s_quadrature": qs_quad,
            "warnings": warnings,
        }),
    )))
}

fn simulate(config: &ScenarioConfig, out: &Path) -> Result<Summary, Error> {
    let s = &config.scenario;
    let run = s.run_gate()?;
    let target = s.target();
    let fid = s.fidelity_trace(config.trace_points)?;
    let pops = s.subspace_populations(config.trace_points)?;
    {
        use std::io::Write;
        let mut w = create(&out.join("trace.csv"))?;
        writeln!(w, "t,fidelity,p_xm_xm,p_xm_xp,p_xp_xm,p_xp_xp")?;
        for (k, t) in fid.times.iter().enumerate() {
            let p = pops.populations[k];
            writeln!(w, "{t:e},{:.12},{:.12},{:.12},{:.12},{:.12}", fid.values[k], p[0], p[1], p[2], p[3])?;
        }
    }
    accumulated_phases(&s.trajectory()?, s.samples)?.write_csv(create(&out.join("phases.csv"))?)?;
    let closed_state = run.state_fidelity(&target, superposition_input());
    println!("gate        = {}", config.gate.name());
    println!("fidelity    = {:.8}", run.fidelity);
    println!("state fid.  = {closed_state:.8}  ((|00⟩+|10⟩)/√2)");
    println!("steps       = {} accepted, {} rejected", run.stats.accepted, run.stats.rejected);
    let mut summary = json!({
        "command": "simulate",
        "gate": config.gate.name(),
        "fidelity": run.fidelity,
        "state_fidelity": closed_state,
        "min_populations": minimum_populations(&pops),
        "steps": run.stats.accepted,
    });
    if s.params.gamma > 0.0 {
        let open = s.run_open()?;
        let state = open.state_fidelity(&target, superposition_input());
        println!("open fid.   = {:.8}  (gamma = {:e} 1/s)", open.fidelity, s.params.gamma);
        println!("open state  = {state:.8}");
        summary["open_fidelity"] = json!(open.fidelity);
        summary["open_state_fidelity"] = json!(state);
    }
    Ok(Some(("simulate.json", summary)))
}

fn sweep(config: &ScenarioConfig, out: &Path) -> Result<Summary, Error> {
    let range: SweepRange = config
        .sweep
        .ok_or_else(|| Error::Config { field: "sweep".into(), message: "no channel given (--channel or `sweep =`)".into() })?;
    let result = run_sweep(&config.scenario, &range, config.jobs)?;
    std::fs::write(out.join("sweep.csv"), result.csv())?;
    result.manifest(&config.hash()).write_json(&out.join("manifest.json"))?;
    let failed = result.rows.iter().filter(|r| r.error.is_some()).count();
    println!("channel = {}, points = {}, failed = {failed}", range.channel.name(), result.rows.len());
    if let Some(f) = result.floor() {
        println!("min fidelity = {f:.8}");
    }
    if range.channel == Channel::Gamma {
        if let Some(r) = result.rows.iter().find(|r| r.fidelity.is_some_and(|f| f < 0.98)) {
            println!("fidelity first below 0.98 at gamma = {:e} 1/s", r.value);
        }
    }
    Ok(None)
}

fn montecarlo(config: &ScenarioConfig, out: &Path) -> Result<Summary, Error> {
    let noise = config
        .scenario
        .noise
        .ok_or_else(|| Error::Config { field: "snr".into(), message: "montecarlo needs an SNR (--snr or `snr =`)".into() })?;
    let mut base = config.scenario.clone();
    base.noise = None;
    let result = run_montecarlo(&base, noise.snr, noise.unit, config.runs, config.seed, config.jobs)?;
    std::fs::write(out.join("montecarlo.csv"), result.csv())?;
    let mut manifest = serde_json::to_value(result.manifest(&config.hash())).map_err(|e| Error::Io(e.to_string()))?;
    manifest["mean_infidelity"] = json!(result.mean_infidelity());
    manifest["std_infidelity"] = json!(result.std_infidelity());
    write_json(&out.join("manifest.json"), &manifest)?;
    let unit = match noise.unit {
        SnrUnit::Decibel => "dB",
        SnrUnit::Linear => "linear",
    };
    println!("snr = {} {unit}, runs = {}", noise.snr, result.rows.len());
    if let Some(m) = result.mean_infidelity() {
        println!("mean 1-F = {m:.6e}, std = {:.3e}", result.std_infidelity().unwrap_or(0.0));
    }
    Ok(None)
}

fn truthtable(config: &ScenarioConfig, out: &Path) -> Result<Summary, Error> {
    let s = &config.scenario;
    let target = s.target();
    let table = if s.params.gamma > 0.0 { s.run_open()?.truth_table } else { s.run_gate()?.truth_table()? };
    table.write_csv(create(&out.join("truth_table.csv"))?)?;
    std::fs::write(out.join("truth_table.txt"), format!("{table}"))?;
    let min = table.min_success(&target);
    print!("{table}");
    println!("min success = {min:.6}");
    Ok(Some((
        "truthtable.json",
        json!({"command": "truthtable", "populations": table.populations, "min_success": min}),
    )))
}

fn phases(config: &ScenarioConfig, out: &Path) -> Result<Summary, Error> {
    let s = &config.scenario;
    let analytic = accumulated_phases(&s.trajectory()?, s.samples)?;
    analytic.write_csv(create(&out.join("phases.csv"))?)?;
    let propagated = s.effective_phases(s.samples / 2)?;
    let (d, g) = (*analytic.dynamic.last().unwrap(), *analytic.geometric.last().unwrap());
    println!("analytic:   theta2(T) = {d:.3e}, Theta2(T) = {g:.9}");
    println!(
        "propagated: dynamic = {:.3e}, geometric = {:.9}, return = {:.9}",
        propagated.dynamic, propagated.geometric, propagated.return_probability
    );
    Ok(Some((
        "phases.json",
        json!({
            "command": "phases",
            "theta2": d,
            "big_theta2": g,
            "propagated_dynamic": propagated.dynamic,
            "propagated_geometric": propagated.geometric,
            "return_probability": propagated.return_probability,
        }),
    )))
}
