//! `rsync-sim` command line.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 filesystem failure.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use super::calibrate::{calibrate, CalibrationSetup, Measurement};
use super::report::{write_csv, write_report, Format};
use super::runner::run_scenario;
use super::scenario::read_scenario;
use super::sweep::{run_sweep, write_sweep_csv, SweepSpec};
use crate::error::{Error, Result};
use crate::estimation::fit_axis;
use crate::motion::{AxisMotion, RhythmicMotion, WaveformKind, AXIS_NAMES};
use crate::sensing::{csv_io, observe, read_track, write_track, write_track_to, SensorModel};

#[derive(Debug, Parser)]
#[command(
    name = "rsync-sim",
    version,
    about = "Motion-synchronization experiments on a rhythmically moving platform"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every policy and trial of one scenario.
    Simulate {
        scenario: PathBuf,
        /// Write per-trial results here; `.json` selects JSON. Default: CSV on stdout.
        #[arg(short, long)]
        out: Vec<PathBuf>,
    },
    /// Run a scenario template once per value of one parameter.
    Sweep(SweepArgs),
    /// Fit a sinusoid to every axis of a track CSV.
    Fit { track: PathBuf },
    /// Write a synthetic track CSV.
    GenTrack(GenTrackArgs),
    /// Tune platform variation and latency jitter to the reference uncertainties.
    Calibrate {
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[arg(long, default_value_t = 200)]
        max_evals: usize,
    },
}

#[derive(Debug, Args)]
struct SweepArgs {
    template: PathBuf,
    /// Dotted path into the scenario, e.g. motion.frequency.
    #[arg(long)]
    param: String,
    /// Comma-separated values; each is read as JSON, falling back to a string.
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "values_json",
        conflicts_with = "values_json"
    )]
    values: Vec<String>,
    /// A JSON array of values, for values that are objects or contain commas.
    #[arg(long)]
    values_json: Option<String>,
    /// Aggregated sweep CSV. Default: stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Also write every trial; `.json` selects JSON.
    #[arg(long)]
    results: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenTrackArgs {
    /// Output CSV. Default: stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.2)]
    frequency: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phase: f64,
    /// Six amplitudes tx,ty,tz,rx,ry,rz (mm and degrees).
    #[arg(long, value_delimiter = ',', default_values_t = [25.0, 0.0, 0.0, 0.0, 0.0, 0.0])]
    amplitudes: Vec<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Sinusoidal)]
    kind: KindArg,
    #[arg(long, default_value_t = 15.0)]
    fps: f64,
    #[arg(long, default_value_t = 60.0)]
    duration: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma_trans: f64,
    #[arg(long, default_value_t = 0.0)]
    sigma_rot: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum KindArg {
    Sinusoidal,
    Breathing,
}

/// Parse `argv` (program name first), run, and return the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        // a closed downstream pipe (`| head`) is not a failure
        Err(Error::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

fn stdout_err(e: io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { scenario, out } => simulate(&scenario, &out),
        Command::Sweep(args) => sweep(args),
        Command::Fit { track } => fit(&track),
        Command::GenTrack(args) => gen_track(args),
        Command::Calibrate { seeds, max_evals } => run_calibrate(seeds, max_evals),
    }
}

fn simulate(path: &Path, outs: &[PathBuf]) -> Result<()> {
    let (sc, warnings) = read_scenario(path)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let reports = run_scenario(&sc)?;
    if outs.is_empty() {
        return write_csv(&reports, io::stdout().lock()).map_err(stdout_err);
    }
    for out in outs {
        write_report(&sc, &reports, out, Format::from_path(out))?;
    }
    Ok(())
}

fn parse_value(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.to_string()))
}

fn sweep(args: SweepArgs) -> Result<()> {
    let (template, warnings) = read_scenario(&args.template)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    let values = match &args.values_json {
        Some(text) => match serde_json::from_str::<Value>(text) {
            Ok(Value::Array(items)) => items,
            _ => return Err(Error::validation("--values-json", "must be a JSON array")),
        },
        None => args.values.iter().map(|s| parse_value(s.trim())).collect(),
    };
    if values.is_empty() {
        return Err(Error::validation(
            "--values",
            "at least one value is required",
        ));
    }
    let spec = SweepSpec {
        template,
        param: args.param,
        values,
    };
    let report = run_sweep(&spec)?;
    match &args.out {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| Error::io(p, e))?;
            write_sweep_csv(&report, io::BufWriter::new(file)).map_err(|e| Error::io(p, e))?;
        }
        None => write_sweep_csv(&report, io::stdout().lock()).map_err(stdout_err)?,
    }
    if let Some(p) = &args.results {
        write_report(&spec.template, &report.reports, p, Format::from_path(p))?;
    }
    Ok(())
}

fn fit(path: &Path) -> Result<()> {
    let track = read_track(path)?;
    let mut out = io::stdout().lock();
    let mut print = || -> io::Result<()> {
        writeln!(
            out,
            "{:<4} {:>14} {:>14} {:>14} {:>14} {:>14} {:>12} flat",
            "axis", "alpha", "omega", "frequency_hz", "phi_s", "offset", "rmse"
        )?;
        for (axis, name) in AXIS_NAMES.iter().enumerate() {
            match fit_axis(&track.times, &track.axis(axis)) {
                Ok(f) => writeln!(
                    out,
                    "{:<4} {:>14.9} {:>14.9} {:>14.9} {:>14.9} {:>14.9} {:>12.3e} {}",
                    name,
                    f.alpha,
                    f.omega,
                    f.frequency(),
                    f.phi,
                    f.offset,
                    f.rmse,
                    f.flat
                )?,
                Err(e) => writeln!(out, "{name:<4} error: {e}")?,
            }
        }
        Ok(())
    };
    print().map_err(stdout_err)
}

fn gen_track(a: GenTrackArgs) -> Result<()> {
    let kind = match a.kind {
        KindArg::Sinusoidal => WaveformKind::Sinusoidal,
        KindArg::Breathing => WaveformKind::Breathing,
    };
    if a.amplitudes.len() != 6 {
        return Err(Error::validation(
            "--amplitudes",
            format!("expected 6 values, got {}", a.amplitudes.len()),
        ));
    }
    let mut axes = [AxisMotion::default(); 6];
    for (axis, amp) in axes.iter_mut().zip(&a.amplitudes) {
        *axis = AxisMotion {
            kind,
            amplitude: *amp,
        };
    }
    let m = RhythmicMotion::new(a.frequency, a.phase, axes)?;
    let sensor = SensorModel {
        fps: a.fps,
        duration: a.duration,
        sigma_trans: a.sigma_trans,
        sigma_rot: a.sigma_rot,
        seed: a.seed,
        ..SensorModel::default()
    };
    let track = observe(&m, &sensor)?;
    match &a.out {
        Some(p) => write_track(&track, p),
        None => write_track_to(&track, io::stdout().lock()).map_err(|e| stdout_err(csv_io(e))),
    }
}

fn run_calibrate(seeds: u64, max_evals: usize) -> Result<()> {
    if seeds == 0 {
        return Err(Error::validation("--seeds", "must be >= 1"));
    }
    let setup = CalibrationSetup {
        seeds,
        ..CalibrationSetup::default()
    };
    let target = Measurement::TARGET;
    let c = calibrate(&setup, &target, max_evals)?;
    let m = c.measurement;
    let mut out = io::stdout().lock();
    let mut print = || -> io::Result<()> {
        writeln!(out, "evaluations        {}", c.evaluations)?;
        writeln!(out, "converged          {}", c.converged)?;
        writeln!(out, "frequency_sigma    {:.6}", c.frequency_sigma)?;
        writeln!(out, "phase_sigma        {:.6}", c.phase_sigma)?;
        writeln!(out, "latency_jitter     {:.6}", c.latency_jitter)?;
        writeln!(
            out,
            "frequency_rel_rmse {:.6} (target {})",
            m.frequency_rel_rmse, target.frequency_rel_rmse
        )?;
        writeln!(
            out,
            "phase_rmse_s       {:.6} (target {})",
            m.phase_rmse, target.phase_rmse
        )?;
        writeln!(
            out,
            "latency_spread_s   {:.6} (target {})",
            m.latency_spread, target.latency_spread
        )
    };
    print().map_err(stdout_err)?;
    if c.converged {
        Ok(())
    } else {
        Err(Error::validation(
            "calibrate",
            format!("did not converge in {max_evals} evaluations"),
        ))
    }
}
