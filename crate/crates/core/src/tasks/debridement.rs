use nalgebra::Vector3;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{prepare, Environment, TrialReport};
use crate::control::{controller_for, ActuationModel, Executor, Policy};
use crate::error::{Error, Result};
use crate::motion::{platform_point, wrap_degrees, Pose6};
use crate::rng::{self, Stream};

const MAX_PLACEMENT_DRAWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DebridementTask {
    pub n_inclusions: u32,
    pub max_attempts: u32,
    /// Half-width of the gripper capture box along and across the seed, mm.
    pub grasp_tolerance: f64,
    /// Per-axis std of the registration error, mm.
    pub registration_sigma: f64,
    pub orientation_tolerance: f64,
    /// Side of the square phantom region, mm.
    pub region: f64,
    pub min_separation: f64,
    /// Tool position before the first grasp, platform frame.
    pub start: [f64; 3],
}

impl Default for DebridementTask {
    fn default() -> Self {
        DebridementTask {
            n_inclusions: 10,
            max_attempts: 20,
            grasp_tolerance: 2.5,
            registration_sigma: 1.125,
            orientation_tolerance: 30.0,
            region: 60.0,
            min_separation: 8.0,
            start: [0.0, -40.0, 0.0],
        }
    }
}

impl DebridementTask {
    pub fn validate(&self) -> Result<()> {
        if self.n_inclusions == 0 {
            return Err(Error::validation("task.n_inclusions", "must be >= 1"));
        }
        if self.max_attempts < self.n_inclusions {
            return Err(Error::validation(
                "task.max_attempts",
                "must be >= n_inclusions",
            ));
        }
        for (path, v) in [
            ("task.grasp_tolerance", self.grasp_tolerance),
            ("task.orientation_tolerance", self.orientation_tolerance),
            ("task.region", self.region),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(path, "must be finite and > 0"));
            }
        }
        for (path, v) in [
            ("task.registration_sigma", self.registration_sigma),
            ("task.min_separation", self.min_separation),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::validation(path, "must be finite and >= 0"));
            }
        }
        if self.start.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("task.start", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inclusion {
    /// Center in the platform frame (z = 0).
    pub center: Vector3<f64>,
    /// Seed axis heading, degrees in [0, 180).
    pub yaw: f64,
}

/// Uniform placement in the phantom square with a minimum pairwise gap.
pub fn place_inclusions<R: Rng + ?Sized>(
    task: &DebridementTask,
    rng: &mut R,
) -> Result<Vec<Inclusion>> {
    let half = task.region / 2.0;
    let mut out: Vec<Inclusion> = Vec::with_capacity(task.n_inclusions as usize);
    let mut draws = 0;
    while out.len() < task.n_inclusions as usize {
        draws += 1;
        if draws > MAX_PLACEMENT_DRAWS {
            return Err(Error::validation(
                "task.min_separation",
                format!(
                    "cannot fit {} inclusions {} mm apart",
                    task.n_inclusions, task.min_separation
                ),
            ));
        }
        let c = Vector3::new(
            rng.random_range(-half..half),
            rng.random_range(-half..half),
            0.0,
        );
        if out
            .iter()
            .all(|p| (p.center - c).norm() >= task.min_separation)
        {
            out.push(Inclusion {
                center: c,
                yaw: rng.random_range(0.0..180.0),
            });
        }
    }
    Ok(out)
}

/// Gripper alignment with a seed: position inside the capture box in the
/// seed's own frame and heading within tolerance, modulo a half turn since
/// the jaws are symmetric.
fn grasped(task: &DebridementTask, inc: &Inclusion, tip: &Vector3<f64>, heading: f64) -> bool {
    let d = tip - inc.center;
    let (s, c) = inc.yaw.to_radians().sin_cos();
    let along = d.x * c + d.y * s;
    let across = -d.x * s + d.y * c;
    let turn = wrap_degrees(2.0 * (heading - inc.yaw)).abs() / 2.0;
    along.abs() <= task.grasp_tolerance
        && across.abs() <= task.grasp_tolerance
        && turn <= task.orientation_tolerance
}

pub fn run_debridement(
    task: &DebridementTask,
    env: &Environment,
    policy: Policy,
    seed: u64,
) -> Result<TrialReport> {
    task.validate()?;
    let prep = prepare(env, policy, seed)?;
    let mut task_rng = rng::stream(seed, Stream::Task);
    let inclusions = place_inclusions(task, &mut task_rng)?;
    let registration = Normal::new(0.0, task.registration_sigma).expect("validated sigma");

    let start = Vector3::from(task.start);
    let clock = env.clock();
    let act = ActuationModel {
        seed,
        ..env.actuation
    };
    let mut controller = controller_for(policy, &prep.fits, &act, clock, start)?;
    let mut ex = Executor::new(&prep.truth, &act, clock, start);

    let mut removed = vec![false; inclusions.len()];
    let (mut attempts, mut successes) = (0u32, 0u32);
    let mut cumulative = 0.0;
    while attempts < task.max_attempts && successes < task.n_inclusions {
        let here = ex.state().position;
        let (idx, inc) = inclusions
            .iter()
            .enumerate()
            .filter(|(i, _)| !removed[*i])
            .min_by(|a, b| {
                (a.1.center - here)
                    .norm()
                    .total_cmp(&(b.1.center - here).norm())
            })
            .expect("an inclusion remains");
        let seen = inc.center
            + Vector3::new(
                registration.sample(&mut task_rng),
                registration.sample(&mut task_rng),
                0.0,
            );
        let g = Pose6::new(seen.x, seen.y, seen.z, 0.0, 0.0, inc.yaw);
        let e = ex.step(controller.as_mut(), &g);

        let tip = platform_point(&e.platform, &e.u.position());
        let heading = e.u.rz - e.platform.rz;
        cumulative += (tip - inc.center).norm();
        attempts += 1;
        if grasped(task, inc, &tip, heading) {
            removed[idx] = true;
            successes += 1;
        }
    }
    let log = ex.finish();
    Ok(TrialReport {
        scenario: String::new(),
        policy,
        trial: 0,
        seed,
        finished: successes == task.n_inclusions,
        max_error: None,
        cumulative_error: cumulative,
        duration: log.duration(),
        attempts: Some(attempts),
        successes: Some(successes),
        note: prep.note,
    })
}
