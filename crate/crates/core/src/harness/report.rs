//! Result files: one CSV row or JSON object per trial.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::scenario::Scenario;
use crate::error::{Error, Result};
use crate::sensing::csv_io;
use crate::tasks::TrialReport;

pub const RESULTS_HEADER: [&str; 10] = [
    "scenario",
    "policy",
    "trial",
    "seed",
    "finished",
    "max_error_mm",
    "cumulative_error_mm",
    "duration_s",
    "attempts",
    "successes",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` means JSON; anything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(reports: &[TrialReport], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER).map_err(csv_io)?;
    for r in reports {
        w.write_record([
            r.scenario.clone(),
            r.policy.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.finished.to_string(),
            opt(r.max_error),
            r.cumulative_error.to_string(),
            r.duration.to_string(),
            opt(r.attempts),
            opt(r.successes),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

#[derive(Serialize)]
struct JsonReport<'a> {
    scenario: serde_json::Value,
    results: &'a [TrialReport],
}

pub fn write_json<W: Write>(
    sc: &Scenario,
    reports: &[TrialReport],
    mut out: W,
) -> std::io::Result<()> {
    let doc = JsonReport {
        scenario: sc.to_value(),
        results: reports,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    writeln!(out)
}

pub fn write_report(
    sc: &Scenario,
    reports: &[TrialReport],
    path: &Path,
    format: Format,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let out = BufWriter::new(file);
    match format {
        Format::Csv => write_csv(reports, out),
        Format::Json => write_json(sc, reports, out),
    }
    .map_err(|e| Error::io(path, e))
}
