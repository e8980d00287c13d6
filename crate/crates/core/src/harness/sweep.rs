//! One-parameter sweeps over a scenario template.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use super::runner::run_scenario;
use super::scenario::{scenario_from_value, set_path, Scenario};
use crate::control::Policy;
use crate::error::Result;
use crate::sensing::csv_io;
use crate::tasks::TrialReport;

pub const SWEEP_HEADER: [&str; 9] = [
    "param",
    "value",
    "policy",
    "n_trials",
    "finished_rate",
    "mean_error_mm",
    "median_error_mm",
    "max_error_mm",
    "std_error_mm",
];

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub template: Scenario,
    /// Dotted path into the resolved scenario JSON, e.g. `motion.frequency`.
    pub param: String,
    pub values: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub n: usize,
    pub finished_rate: f64,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
    /// Sample standard deviation (0 for a single trial).
    pub std: f64,
}

impl Summary {
    pub fn of(errors: &[f64], finished: usize) -> Summary {
        let n = errors.len();
        let mean = errors.iter().sum::<f64>() / n as f64;
        let mut sorted = errors.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        let std = if n > 1 {
            (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary {
            n,
            finished_rate: finished as f64 / n as f64,
            mean,
            median,
            max: sorted[n - 1],
            std,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: Value,
    pub policy: Policy,
    pub summary: Summary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub param: String,
    pub rows: Vec<SweepRow>,
    pub reports: Vec<TrialReport>,
}

/// The error a trial is ranked by: the cut's excursion for cutting, the
/// summed grasp error otherwise.
pub fn trial_error(r: &TrialReport) -> f64 {
    r.max_error.unwrap_or(r.cumulative_error)
}

fn label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn summarize(reports: &[TrialReport], policies: &[Policy], value: &Value) -> Vec<SweepRow> {
    policies
        .iter()
        .map(|&p| {
            let mine: Vec<&TrialReport> = reports.iter().filter(|r| r.policy == p).collect();
            let errors: Vec<f64> = mine.iter().map(|r| trial_error(r)).collect();
            SweepRow {
                value: value.clone(),
                policy: p,
                summary: Summary::of(&errors, mine.iter().filter(|r| r.finished).count()),
            }
        })
        .collect()
}

/// The template with `param` set to `value`, revalidated.
pub fn instantiate(template: &Scenario, param: &str, value: &Value) -> Result<Scenario> {
    let mut v = template.to_value();
    set_path(&mut v, param, value.clone())?;
    let (mut sc, _) = scenario_from_value(v)?;
    sc.name = format!("{}[{}={}]", template.name, param, label(value));
    Ok(sc)
}

pub fn run_sweep(sw: &SweepSpec) -> Result<SweepReport> {
    // resolve every value first so a bad one fails before any work is done
    let scenarios = sw
        .values
        .iter()
        .map(|v| instantiate(&sw.template, &sw.param, v))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (sc, value) in scenarios.iter().zip(&sw.values) {
        let r = run_scenario(sc)?;
        rows.extend(summarize(&r, &sc.policies, value));
        reports.extend(r);
    }
    Ok(SweepReport {
        param: sw.param.clone(),
        rows,
        reports,
    })
}

pub fn write_sweep_csv<W: Write>(report: &SweepReport, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_io)?;
    for row in &report.rows {
        let s = &row.summary;
        w.write_record([
            report.param.clone(),
            label(&row.value),
            row.policy.to_string(),
            s.n.to_string(),
            s.finished_rate.to_string(),
            s.mean.to_string(),
            s.median.to_string(),
            s.max.to_string(),
            s.std.to_string(),
        ])
        .map_err(csv_io)?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 4.0, 2.0, 3.0], 3);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.median, 2.5);
        assert_eq!(s.max, 4.0);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert_eq!(s.finished_rate, 0.75);
        assert_eq!(Summary::of(&[2.0], 1).std, 0.0);
    }
}
