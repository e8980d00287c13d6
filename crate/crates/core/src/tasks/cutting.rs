use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{prepare, Environment, TrialReport};
use crate::control::{controller_for, cumulative_error, Executor, Policy};
use crate::error::{Error, Result};
use crate::motion::{platform_point, Pose6};

/// A straight cut along the platform's y axis, centered on the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CuttingTask {
    pub line_length: f64,
    pub line_thickness: f64,
    pub waypoint_spacing: f64,
    /// Off-line distance at which the scissors lose the material, mm.
    pub disengage_threshold: f64,
}

impl Default for CuttingTask {
    fn default() -> Self {
        CuttingTask {
            line_length: 50.0,
            line_thickness: 2.0,
            waypoint_spacing: 2.5,
            disengage_threshold: 6.0,
        }
    }
}

impl CuttingTask {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        if !pos(self.line_length) {
            return Err(Error::validation(
                "task.line_length",
                "must be finite and > 0",
            ));
        }
        if !pos(self.line_thickness) {
            return Err(Error::validation(
                "task.line_thickness",
                "must be finite and > 0",
            ));
        }
        if !pos(self.waypoint_spacing) || self.waypoint_spacing > self.line_length {
            return Err(Error::validation(
                "task.waypoint_spacing",
                "must be > 0 and <= line_length",
            ));
        }
        if !pos(self.disengage_threshold) {
            return Err(Error::validation(
                "task.disengage_threshold",
                "must be finite and > 0",
            ));
        }
        Ok(())
    }

    /// Waypoints from one end of the line to the other, both ends included.
    pub fn waypoints(&self) -> Vec<Pose6> {
        let half = self.line_length / 2.0;
        let mut ys: Vec<f64> = (0..)
            .map(|i| -half + i as f64 * self.waypoint_spacing)
            .take_while(|y| *y <= half + 1e-9)
            .collect();
        if half - ys[ys.len() - 1] > 1e-9 {
            ys.push(half);
        }
        ys.into_iter()
            .map(|y| Pose6::translation(0.0, y, 0.0))
            .collect()
    }
}

/// Distance from a platform-frame point to the cut line.
fn off_line(q: &Vector3<f64>) -> f64 {
    q.x.hypot(q.z)
}

pub fn run_cutting(
    task: &CuttingTask,
    env: &Environment,
    policy: Policy,
    seed: u64,
) -> Result<TrialReport> {
    task.validate()?;
    let prep = prepare(env, policy, seed)?;
    let waypoints = task.waypoints();
    let start = waypoints[0].position();
    let clock = env.clock();
    let act = crate::control::ActuationModel {
        seed,
        ..env.actuation
    };
    let mut controller = controller_for(policy, &prep.fits, &act, clock, start)?;
    let mut ex = Executor::new(&prep.truth, &act, clock, start);

    // a failed cut still runs to the end so its duration is comparable
    let mut worst: f64 = 0.0;
    for g in &waypoints {
        let e = ex.step(controller.as_mut(), g);
        worst = worst.max(off_line(&platform_point(&e.platform, &e.u.position())));
    }
    let log = ex.finish();
    Ok(TrialReport {
        scenario: String::new(),
        policy,
        trial: 0,
        seed,
        finished: worst <= task.disengage_threshold,
        max_error: Some((worst - task.line_thickness / 2.0).max(0.0)),
        cumulative_error: cumulative_error(&log),
        duration: log.duration(),
        attempts: None,
        successes: None,
        note: prep.note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::RhythmicMotion;

    #[test]
    fn default_line_has_21_waypoints() {
        let w = CuttingTask::default().waypoints();
        assert_eq!(w.len(), 21);
        assert_eq!(w[0].ty, -25.0);
        assert_eq!(w[20].ty, 25.0);
        let odd = CuttingTask {
            line_length: 10.0,
            waypoint_spacing: 4.0,
            ..CuttingTask::default()
        };
        let ys: Vec<f64> = odd.waypoints().iter().map(|p| p.ty).collect();
        assert_eq!(ys, vec![-5.0, -1.0, 3.0, 5.0]);
    }

    #[test]
    fn still_platform_is_clean() {
        let env = Environment::ideal(RhythmicMotion::stationary());
        for policy in Policy::ALL {
            let r = run_cutting(&CuttingTask::default(), &env, policy, 1).unwrap();
            assert!(r.finished);
            assert_eq!(r.max_error, Some(0.0));
        }
    }

    #[test]
    fn unsynchronized_swing_disengages() {
        let m = RhythmicMotion::sinusoidal([25.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.2, 0.0).unwrap();
        for seed in 0..4 {
            let r = run_cutting(
                &CuttingTask::default(),
                &Environment::new(m),
                Policy::None,
                seed,
            )
            .unwrap();
            assert!(!r.finished);
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        let t = CuttingTask {
            waypoint_spacing: 60.0,
            ..CuttingTask::default()
        };
        let env = Environment::ideal(RhythmicMotion::stationary());
        let err = run_cutting(&t, &env, Policy::None, 0).unwrap_err();
        assert!(err.to_string().contains("task.waypoint_spacing"));
    }
}
