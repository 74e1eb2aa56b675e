//! Command-line front end: control-limit calibration, synthetic benchmarks,
//! dataset runs, and live monitoring of an error-bit stream on stdin.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ecdd::calibration::{
    estimate_arl0, fit_table_entry, grid, CalibrationTable, DEFAULT_BASIS_POWERS,
    FULL_DEGREE7_BASIS,
};
use ecdd::detector::{Detector, DetectorConfig, DetectorStatus, DEFAULT_MIN_OBSERVATIONS};
use ecdd::error::{EcddError, Result};
use ecdd::harness::{run_experiment, run_paired, ExperimentReport, ExperimentSpec};
use ecdd::presets::{list_presets, parse_preset};
use ecdd::seed;

mod config_file;
use config_file::load_experiment_config;

#[derive(Parser)]
#[command(
    name = "ecdd",
    about = "EWMA-chart concept drift detection: calibrate control limits, run \
             benchmark experiments, and monitor error-bit streams",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit control-limit polynomials for target ARL0 values and write a
    /// calibration table file.
    Calibrate(CalibrateArgs),
    /// Run one replication of an experiment and emit its detection log and
    /// optional sliding-window accuracy trace.
    Simulate(RunArgs),
    /// Run a replicated benchmark experiment (preset or config file).
    Bench(BenchArgs),
    /// Monitor an error-bit stream from stdin, one 0/1 per line.
    Monitor(MonitorArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    /// EWMA weight.
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    /// Target ARL0 values (comma separated).
    #[arg(long, value_delimiter = ',', required = true)]
    arl0: Vec<f64>,
    /// Output table file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = ecdd::calibration::DEFAULT_GRID_START)]
    grid_start: f64,
    #[arg(long, default_value_t = ecdd::calibration::DEFAULT_GRID_END)]
    grid_end: f64,
    #[arg(long, default_value_t = ecdd::calibration::DEFAULT_GRID_STEP)]
    grid_step: f64,
    /// Fit the full degree-7 basis instead of the constant-plus-odd-powers
    /// shape.
    #[arg(long)]
    full_degree7: bool,
    /// Monte Carlo replications per ARL evaluation during the search.
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    /// Replications for the round-trip verification pass.
    #[arg(long, default_value_t = 10_000)]
    verify_reps: u64,
    /// Skip the round-trip verification pass.
    #[arg(long)]
    no_verify: bool,
    /// Root seed; generated and printed when absent.
    #[arg(long)]
    seed: Option<u64>,
}

/// Arguments shared by `simulate` and `bench`.
#[derive(Args)]
struct RunArgs {
    /// Bundled preset name (see `bench --list`).
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Experiment config file (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Calibration table file; the bundled fitted table when absent.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Root seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// EWMA weight override for preset detectors.
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    /// Dataset file for the `elec` presets.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Write the machine-readable report (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Sliding-window size for the accuracy trace of replication 0.
    #[arg(long)]
    window: Option<usize>,
    /// Write the window trace as two-column CSV here.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Replication count override.
    #[arg(long)]
    reps: Option<u64>,
    /// Second preset to run on the same streams for a paired McNemar
    /// comparison.
    #[arg(long)]
    baseline: Option<String>,
    /// List the bundled presets and exit.
    #[arg(long)]
    list: bool,
}

#[derive(Args)]
struct MonitorArgs {
    /// Calibration table file; the bundled fitted table when absent.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    lambda: f64,
    /// Target ARL0 (must have a table entry for the chosen lambda).
    #[arg(long)]
    arl0: f64,
    #[arg(long, default_value_t = 0.5)]
    warning_fraction: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_OBSERVATIONS)]
    min_observations: u64,
    /// Stop after the first drift instead of resetting and continuing.
    #[arg(long)]
    no_auto_reset: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Monitor(args) => cmd_monitor(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn entropy_seed() -> u64 {
    rand::random::<u64>()
}

fn load_table(path: Option<&Path>) -> Result<CalibrationTable> {
    match path {
        Some(p) => CalibrationTable::load(p),
        None => Ok(CalibrationTable::builtin()),
    }
}

/// Fixed 6-significant-digit rendering used by monitor status lines.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.5}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let precision = (5 - magnitude).max(0) as usize;
    format!("{x:.precision$}")
}

fn cmd_calibrate(args: CalibrateArgs) -> Result<()> {
    if !(args.grid_start < args.grid_end) || args.grid_step <= 0.0 {
        return Err(EcddError::Config("grid bounds must satisfy start < end, step > 0".into()));
    }
    for &target in &args.arl0 {
        if !(target > 1.0) {
            return Err(EcddError::Config(format!(
                "target ARL0 {target} is unsupported (must exceed 1)"
            )));
        }
    }
    let seed_value = args.seed.unwrap_or_else(entropy_seed);
    if args.seed.is_none() {
        println!("seed: {seed_value} (generated; pass --seed to reproduce)");
    }
    let points = grid(args.grid_start, args.grid_end, args.grid_step);
    let basis: &[u32] = if args.full_degree7 {
        &FULL_DEGREE7_BASIS
    } else {
        &DEFAULT_BASIS_POWERS
    };

    let mut table = CalibrationTable::new();
    for (i, &target) in args.arl0.iter().enumerate() {
        eprintln!(
            "fitting lambda={} arl0={} over {} grid points...",
            args.lambda,
            target,
            points.len()
        );
        let entry = fit_table_entry(
            args.lambda,
            target,
            &points,
            basis,
            args.reps,
            seed::derive(seed_value, i as u64),
        )?;
        table.insert(entry)?;
    }
    table.save(&args.out)?;
    println!("wrote {} entries to {}", table.entries.len(), args.out.display());

    if args.no_verify {
        return Ok(());
    }
    println!("round-trip verification ({} reps per point):", args.verify_reps);
    let mut worst: f64 = 0.0;
    let mut failures = 0u32;
    for entry in &table.entries {
        for (j, &p0) in points.iter().enumerate() {
            let limit = entry.eval_clamped(p0);
            let est = estimate_arl0(
                p0,
                entry.lambda,
                limit,
                args.verify_reps,
                (100.0 * entry.arl0).ceil() as u64,
                seed::derive(seed_value, 1_000_000 + j as u64),
            )?;
            let rel = (est.mean - entry.arl0) / entry.arl0;
            worst = worst.max(rel.abs());
            if rel.abs() > 0.15 {
                failures += 1;
                println!(
                    "  FAIL arl0={} p0={p0:.3}: simulated {:.1} ({:+.1}%)",
                    entry.arl0,
                    est.mean,
                    rel * 100.0
                );
            }
        }
        println!("  arl0={}: verified over {} grid points", entry.arl0, points.len());
    }
    println!("worst round-trip deviation: {:.2}%", worst * 100.0);
    if failures > 0 {
        return Err(EcddError::Search(format!(
            "{failures} grid points fell outside the +/-15% round-trip band"
        )));
    }
    Ok(())
}

fn resolve_spec(run: &RunArgs, reps_override: Option<u64>) -> Result<ExperimentSpec> {
    let mut spec = match (&run.preset, &run.config) {
        (Some(name), None) => parse_preset(name, run.lambda, run.data.as_deref())?,
        (None, Some(path)) => load_experiment_config(path)?,
        (None, None) => {
            return Err(EcddError::Config(
                "pass either --preset <name> or --config <file>".into(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    if let Some(reps) = reps_override {
        if reps < 1 {
            return Err(EcddError::Config("--reps must be at least 1".into()));
        }
        spec.replications = reps;
    }
    if let Some(seed_value) = run.seed {
        spec.base_seed = seed_value;
    }
    Ok(spec)
}

fn write_report(report: &ExperimentReport, run: &RunArgs) -> Result<()> {
    if let Some(out) = &run.out {
        let json = serde_json::to_string_pretty(report).expect("report serializes");
        std::fs::write(out, json + "\n").map_err(|e| EcddError::Io {
            path: out.display().to_string(),
            source: e,
        })?;
    }
    if let Some(trace_path) = &run.trace_out {
        let trace = report.window_trace.as_ref().ok_or_else(|| {
            EcddError::Config("--trace-out needs --window <size>".into())
        })?;
        let mut text = String::from("t,accuracy\n");
        for (t, acc) in trace {
            text.push_str(&format!("{t},{acc}\n"));
        }
        std::fs::write(trace_path, text).map_err(|e| EcddError::Io {
            path: trace_path.display().to_string(),
            source: e,
        })?;
    }
    Ok(())
}

fn cmd_simulate(args: RunArgs) -> Result<()> {
    let mut spec = resolve_spec(&args, Some(1))?;
    spec.replications = 1;
    println!("seed: {}", spec.base_seed);
    let table = load_table(args.table.as_deref())?;
    let report = run_experiment(&spec, &table, args.window)?;
    println!("observations: accuracy {:.4}", report.mean_accuracy);
    if report.detections.is_empty() {
        println!("detections: none");
    } else {
        let times: Vec<String> = report.detections.iter().map(|(_, t)| t.to_string()).collect();
        println!("detections: {} (t = {})", report.detections.len(), times.join(", "));
    }
    write_report(&report, &args)?;
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.list {
        for name in list_presets() {
            println!("{name}");
        }
        return Ok(());
    }
    let spec = resolve_spec(&args.run, args.reps)?;
    let table = load_table(args.run.table.as_deref())?;
    let label = args
        .run
        .preset
        .clone()
        .or_else(|| args.run.config.as_ref().map(|p| p.display().to_string()))
        .unwrap_or_else(|| "experiment".into());

    let report = run_experiment(&spec, &table, args.run.window)?;
    println!(
        "{:<32} mean accuracy {:.4}  sd {:.4}  reps {}  detections {}  seed {}",
        label,
        report.mean_accuracy,
        report.std_error,
        spec.replications,
        report.detections.len(),
        report.base_seed
    );

    if let Some(baseline) = &args.baseline {
        let mut other = parse_preset(baseline, args.run.lambda, args.run.data.as_deref())?;
        other.replications = spec.replications;
        other.base_seed = spec.base_seed;
        other.stream = spec.stream.clone();
        let cmp = run_paired(&spec, &other, &table)?;
        println!(
            "{:<32} mean accuracy {:.4}  (paired baseline)",
            baseline, cmp.mean_accuracy_b
        );
        println!(
            "mcnemar: b={} c={} chi2={:.3}",
            cmp.b, cmp.c, cmp.statistic
        );
    }
    write_report(&report, &args.run)?;
    Ok(())
}

fn cmd_monitor(args: MonitorArgs) -> Result<()> {
    let table = load_table(args.table.as_deref())?;
    let config = DetectorConfig {
        lambda: args.lambda,
        target_arl0: args.arl0,
        warning_fraction: args.warning_fraction,
        min_observations: args.min_observations,
        warning_buffer_cap: None,
    };
    let mut detector: Detector<()> = Detector::new(config.clone(), &table)?;

    let stdin = std::io::stdin().lock();
    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut line_no = 0u64;
    for line in stdin.lines() {
        let line = line.map_err(|e| EcddError::Io {
            path: "<stdin>".into(),
            source: e,
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        line_no += 1;
        let bit: u8 = match trimmed {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(EcddError::Parse(format!(
                    "stdin line {line_no}: expected 0 or 1, got '{other}'"
                )))
            }
        };
        let status = detector.step(bit, None)?;
        let state = detector.state();
        writeln!(
            out,
            "{line_no} {} {} {} {}",
            status.as_str(),
            sig6(state.z),
            sig6(state.p_hat),
            sig6(detector.limit())
        )
        .map_err(|e| EcddError::Io {
            path: "<stdout>".into(),
            source: e,
        })?;
        if status == DetectorStatus::Drift {
            writeln!(out, "detection {line_no}").map_err(|e| EcddError::Io {
                path: "<stdout>".into(),
                source: e,
            })?;
            if args.no_auto_reset {
                break;
            }
            detector.reset();
        }
    }
    out.flush().map_err(|e| EcddError::Io {
        path: "<stdout>".into(),
        source: e,
    })?;
    Ok(())
}
