use nalgebra::Vector3;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use super::{ActuationModel, Controller, Decision, RobotState};
use crate::motion::{apply_motion, MotionSource, Pose6};
use crate::rng::{self, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogEntry {
    /// Nominal target in the platform frame.
    pub g: Pose6,
    pub u: Pose6,
    pub tau_intended: Option<f64>,
    /// Time the robot started moving.
    pub start: f64,
    pub travel: f64,
    pub latency: f64,
    pub tau_realized: f64,
    /// Platform pose at `tau_realized`.
    pub platform: Pose6,
    /// Where the target actually was at `tau_realized`.
    pub target_realized: Pose6,
    /// Translational distance between `target_realized` and `u`, mm.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExecutionLog {
    pub entries: Vec<LogEntry>,
    pub start: f64,
    pub end: f64,
}

impl ExecutionLog {
    pub fn duration(&self) -> f64 {
        self.end - self.start
    }
}

pub fn cumulative_error(log: &ExecutionLog) -> f64 {
    log.entries.iter().map(|e| e.error).sum()
}

/// Speed-limited robot with jittered latency acting on a moving platform.
pub struct Executor<'a> {
    motion: &'a dyn MotionSource,
    act: ActuationModel,
    rng: ChaCha8Rng,
    jitter: Normal<f64>,
    now: f64,
    position: Vector3<f64>,
    log: ExecutionLog,
}

impl<'a> Executor<'a> {
    pub fn new(
        motion: &'a dyn MotionSource,
        act: &ActuationModel,
        clock: f64,
        start: Vector3<f64>,
    ) -> Self {
        Executor {
            motion,
            act: *act,
            rng: rng::stream(act.seed, Stream::Actuation),
            jitter: Normal::new(0.0, act.latency_jitter).expect("jitter is validated"),
            now: clock,
            position: start,
            log: ExecutionLog {
                entries: Vec::new(),
                start: clock,
                end: clock,
            },
        }
    }

    pub fn state(&self) -> RobotState {
        RobotState {
            now: self.now,
            position: self.position,
        }
    }

    /// Ask the controller for a decision on `g` and carry it out.
    pub fn step(&mut self, controller: &mut dyn Controller, g: &Pose6) -> LogEntry {
        let d = controller.decide(g, &self.state());
        self.run(g, &d)
    }

    pub fn run(&mut self, g: &Pose6, d: &Decision) -> LogEntry {
        let start = d.issue.map_or(self.now, |t| t.max(self.now));
        let travel = self.act.travel_time(&self.position, &d.u.position());
        let latency = (self.act.latency_mean + self.jitter.sample(&mut self.rng)).max(0.0);
        let tau = start + travel + latency;
        let platform = self.motion.pose_at(tau);
        let target_realized = apply_motion(&platform, g);
        let entry = LogEntry {
            g: *g,
            u: d.u,
            tau_intended: d.tau,
            start,
            travel,
            latency,
            tau_realized: tau,
            platform,
            target_realized,
            error: target_realized.translation_distance(&d.u),
        };
        self.now = tau;
        self.position = d.u.position();
        self.log.end = tau;
        self.log.entries.push(entry);
        entry
    }

    pub fn finish(self) -> ExecutionLog {
        self.log
    }
}

/// Run every target in order through `controller`.
pub fn execute(
    targets: &[Pose6],
    controller: &mut dyn Controller,
    motion: &dyn MotionSource,
    act: &ActuationModel,
    clock: f64,
    start: Vector3<f64>,
) -> ExecutionLog {
    let mut ex = Executor::new(motion, act, clock, start);
    for g in targets {
        ex.step(controller, g);
    }
    ex.finish()
}
