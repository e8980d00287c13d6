//! Scenario files: JSON descriptions of one experimental condition.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::control::{ActuationModel, Policy};
use crate::error::{Error, Result};
use crate::motion::{AxisMotion, PlatformVariation, RhythmicMotion};
use crate::sensing::SensorModel;
use crate::tasks::{CuttingTask, DebridementTask, Environment};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct AxesSpec {
    pub tx: AxisMotion,
    pub ty: AxisMotion,
    pub tz: AxisMotion,
    pub rx: AxisMotion,
    pub ry: AxisMotion,
    pub rz: AxisMotion,
}

impl AxesSpec {
    pub fn to_array(&self) -> [AxisMotion; 6] {
        [self.tx, self.ty, self.tz, self.rx, self.ry, self.rz]
    }

    pub fn from_amplitudes(a: [f64; 6]) -> Self {
        let m = a.map(AxisMotion::sine);
        AxesSpec {
            tx: m[0],
            ty: m[1],
            tz: m[2],
            rx: m[3],
            ry: m[4],
            rz: m[5],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    /// Hz, shared by every axis.
    pub frequency: f64,
    /// Seconds, shared by every axis.
    #[serde(default)]
    pub phase: f64,
    #[serde(default)]
    pub axes: AxesSpec,
    #[serde(default)]
    pub variation: PlatformVariation,
}

impl MotionSpec {
    pub fn motion(&self) -> Result<RhythmicMotion> {
        RhythmicMotion::new(self.frequency, self.phase, self.axes.to_array())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TaskSpec {
    Cutting(CuttingTask),
    Debridement(DebridementTask),
}

impl TaskSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            TaskSpec::Cutting(t) => t.validate(),
            TaskSpec::Debridement(t) => t.validate(),
        }
    }
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    pub motion: MotionSpec,
    #[serde(default)]
    pub sensor: SensorModel,
    #[serde(default)]
    pub actuation: ActuationModel,
    pub task: TaskSpec,
    pub policies: Vec<Policy>,
    pub n_trials: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn environment(&self) -> Result<Environment> {
        Ok(Environment {
            motion: self.motion.motion()?,
            variation: self.motion.variation,
            sensor: self.sensor,
            actuation: self.actuation,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.environment()?.validate()?;
        self.task.validate()?;
        if self.policies.is_empty() {
            return Err(Error::validation(
                "policies",
                "must name at least one policy",
            ));
        }
        let unique: BTreeSet<_> = self.policies.iter().collect();
        if unique.len() != self.policies.len() {
            return Err(Error::validation("policies", "must not repeat a policy"));
        }
        if self.n_trials == 0 {
            return Err(Error::validation("n_trials", "must be >= 1"));
        }
        Ok(())
    }

    /// The scenario with every default filled in.
    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("scenario serializes")
    }
}

/// Parse a scenario from a JSON value. Returns the scenario and one warning
/// per input field the schema does not know.
pub fn scenario_from_value(value: Value) -> Result<(Scenario, Vec<String>)> {
    let sc: Scenario = serde_path_to_error::deserialize(&value).map_err(|e| {
        let path = e.path().to_string();
        Error::Config {
            path: if path == "." { "scenario".into() } else { path },
            reason: e.into_inner().to_string(),
        }
    })?;
    let mut warnings = Vec::new();
    unknown_fields(&value, &sc.to_value(), "", &mut warnings);
    sc.validate()?;
    Ok((sc, warnings))
}

pub fn parse_scenario(text: &str) -> Result<(Scenario, Vec<String>)> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Config {
        path: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    scenario_from_value(value)
}

pub fn read_scenario(path: &Path) -> Result<(Scenario, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scenario(&text)
}

pub fn write_scenario(sc: &Scenario, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&sc.to_value()).expect("scenario serializes");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

fn unknown_fields(input: &Value, known: &Value, prefix: &str, out: &mut Vec<String>) {
    if let (Value::Object(a), Value::Object(b)) = (input, known) {
        for (k, v) in a {
            let path = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            match b.get(k) {
                Some(kv) => unknown_fields(v, kv, &path, out),
                None => out.push(format!("unknown field {path} ignored")),
            }
        }
    }
}

/// Set the value at a dotted path, which must already exist.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let mut cur = root;
    for key in path.split('.') {
        cur = match cur {
            Value::Object(map) => map.get_mut(key),
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| Error::validation(path, "parameter path does not exist in the scenario"))?;
    }
    *cur = value;
    Ok(())
}
