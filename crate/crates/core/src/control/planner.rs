use nalgebra::Vector3;

use super::{ActuationModel, Controller, Decision, Policy, RobotState};
use crate::error::{Error, Result};
use crate::estimation::{dominant_axis, next_extremum, SineFit};
use crate::motion::Pose6;

/// Coarse step when bracketing the full-sync completion time, s.
const SCAN_STEP: f64 = 0.02;
const BISECTIONS: usize = 60;

fn check_fits(fits: &[SineFit]) -> Result<[SineFit; 6]> {
    fits.try_into().map_err(|_| Error::NoFit(fits.len()))
}

/// `g` shifted by the predicted oscillation of every axis at `t`.
fn compensate(g: &Pose6, fits: &[SineFit; 6], t: f64) -> Pose6 {
    let mut u = *g;
    for (axis, fit) in fits.iter().enumerate() {
        u.set(axis, g.get(axis) + fit.displacement(t));
    }
    u
}

pub fn plan_no_sync(targets: &[Pose6]) -> Result<Vec<Decision>> {
    if targets.is_empty() {
        return Err(Error::EmptyTargets);
    }
    let mut c = NoSync;
    let state = RobotState {
        now: 0.0,
        position: Vector3::zeros(),
    };
    Ok(targets.iter().map(|g| c.decide(g, &state)).collect())
}

pub fn plan_full_sync(fits: &[SineFit], act: &ActuationModel) -> Result<FullSync> {
    Ok(FullSync {
        fits: check_fits(fits)?,
        speed: act.speed,
        latency: act.latency_mean,
    })
}

/// Intermittent controller whose predicted schedule starts at `clock` with the
/// tool at `start`. A flat dominant fit yields a controller that behaves like
/// [`NoSync`] and reports [`Intermittent::fell_back`].
pub fn plan_intermittent(
    fits: &[SineFit],
    act: &ActuationModel,
    clock: f64,
    start: Vector3<f64>,
) -> Result<Intermittent> {
    let fits = check_fits(fits)?;
    let dominant = match dominant_axis(&fits) {
        Ok(axis) => Some(fits[axis]),
        Err(Error::AllFlat) => {
            log::warn!("no oscillation detected; intermittent sync falls back to no sync");
            None
        }
        Err(e) => return Err(e),
    };
    Ok(Intermittent {
        fits,
        dominant,
        speed: act.speed,
        latency: act.latency_mean,
        pred_free: clock,
        pred_pos: start,
    })
}

pub fn controller_for(
    policy: Policy,
    fits: &[SineFit],
    act: &ActuationModel,
    clock: f64,
    start: Vector3<f64>,
) -> Result<Box<dyn Controller>> {
    Ok(match policy {
        Policy::None => Box::new(NoSync),
        Policy::Full => Box::new(plan_full_sync(fits, act)?),
        Policy::Intermittent => Box::new(plan_intermittent(fits, act, clock, start)?),
    })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoSync;

impl Controller for NoSync {
    fn decide(&mut self, g: &Pose6, _state: &RobotState) -> Decision {
        Decision {
            u: *g,
            tau: None,
            issue: None,
        }
    }
}

/// Closed-loop compensation: at each decision, predict the completion time
/// from the actual clock and position and offset the command by the fitted
/// motion at that time.
#[derive(Debug, Clone)]
pub struct FullSync {
    fits: [SineFit; 6],
    speed: f64,
    latency: f64,
}

impl FullSync {
    /// Earliest `tau` with `tau = now + latency + travel(pos -> u(tau))`.
    pub fn predict_completion(&self, g: &Pose6, state: &RobotState) -> f64 {
        let gap = |tau: f64| {
            let u = compensate(g, &self.fits, tau);
            tau - state.now - self.latency - (u.position() - state.position).norm() / self.speed
        };
        let mut lo = state.now + self.latency;
        if gap(lo) >= 0.0 {
            return lo;
        }
        let mut hi = lo + SCAN_STEP;
        while gap(hi) < 0.0 {
            lo = hi;
            hi += SCAN_STEP;
        }
        for _ in 0..BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if gap(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

impl Controller for FullSync {
    fn decide(&mut self, g: &Pose6, state: &RobotState) -> Decision {
        let tau = self.predict_completion(g, state);
        Decision {
            u: compensate(g, &self.fits, tau),
            tau: Some(tau),
            issue: None,
        }
    }
}

/// Precommitted extremum schedule. The controller keeps its own predicted
/// clock and tool position and never looks at the realized state, so latency
/// jitter shifts arrivals away from the planned extrema.
#[derive(Debug, Clone)]
pub struct Intermittent {
    fits: [SineFit; 6],
    dominant: Option<SineFit>,
    speed: f64,
    latency: f64,
    pred_free: f64,
    pred_pos: Vector3<f64>,
}

impl Intermittent {
    pub fn fell_back(&self) -> bool {
        self.dominant.is_none()
    }
}

impl Controller for Intermittent {
    fn decide(&mut self, g: &Pose6, state: &RobotState) -> Decision {
        let Some(dom) = self.dominant else {
            return NoSync.decide(g, state);
        };
        let half = std::f64::consts::PI / dom.omega;
        let mut s = next_extremum(&dom, self.pred_free).expect("dominant fit is not flat");
        loop {
            let u = compensate(g, &self.fits, s);
            let travel = (u.position() - self.pred_pos).norm() / self.speed;
            let issue = s - travel - self.latency;
            // the command would have to start before the robot is free: defer
            if issue >= self.pred_free - 1e-12 {
                self.pred_free = s;
                self.pred_pos = u.position();
                return Decision {
                    u,
                    tau: Some(s),
                    issue: Some(issue),
                };
            }
            s += half;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn x_fit(alpha: f64, f: f64) -> [SineFit; 6] {
        let mut fits = [SineFit::flat(0.0, 0.0); 6];
        fits[0] = SineFit {
            alpha,
            omega: 2.0 * PI * f,
            phi: 0.0,
            offset: 3.0,
            rmse: 0.0,
            flat: false,
        };
        fits
    }

    fn state(now: f64) -> RobotState {
        RobotState {
            now,
            position: Vector3::zeros(),
        }
    }

    #[test]
    fn no_sync_plan_is_identity() {
        let targets: Vec<Pose6> = (0..5)
            .map(|i| Pose6::translation(i as f64, 0.0, 0.0))
            .collect();
        let plan = plan_no_sync(&targets).unwrap();
        assert_eq!(plan.len(), 5);
        for (d, g) in plan.iter().zip(&targets) {
            assert_eq!(d.u, *g);
            assert_eq!(d.tau, None);
        }
        assert!(matches!(plan_no_sync(&[]), Err(Error::EmptyTargets)));
    }

    #[test]
    fn full_sync_with_flat_fits_is_no_sync() {
        let act = ActuationModel::default();
        let mut c = plan_full_sync(&[SineFit::flat(1.0, 0.0); 6], &act).unwrap();
        let g = Pose6::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0);
        assert_eq!(c.decide(&g, &state(0.0)).u, g);
        assert!(matches!(
            plan_full_sync(&[SineFit::flat(0.0, 0.0); 5], &act),
            Err(Error::NoFit(5))
        ));
    }

    #[test]
    fn full_sync_completion_is_consistent() {
        let act = ActuationModel {
            speed: 10.0,
            latency_mean: 0.5,
            ..ActuationModel::default()
        };
        let mut c = plan_full_sync(&x_fit(5.0, 0.2), &act).unwrap();
        let g = Pose6::translation(0.0, 20.0, 0.0);
        let s = state(3.0);
        let d = c.decide(&g, &s);
        let tau = d.tau.unwrap();
        let travel = d.u.position().norm() / act.speed;
        assert_abs_diff_eq!(tau, 3.0 + 0.5 + travel, epsilon = 1e-9);
        assert_abs_diff_eq!(d.u.tx, 5.0 * (0.4 * PI * tau).sin(), epsilon = 1e-12);
    }

    #[test]
    fn intermittent_schedule_example() {
        // 4 targets, 2.5 s between extrema, 0.5 s travel each, 0.25 s latency
        let act = ActuationModel {
            speed: 10.0,
            latency_mean: 0.25,
            ..ActuationModel::default()
        };
        let fits = x_fit(1e-12, 0.2);
        let mut c = plan_intermittent(&fits, &act, 0.0, Vector3::zeros()).unwrap();
        let mut last = 0.0;
        for i in 0..4 {
            let g = Pose6::translation(0.0, 5.0 * (i + 1) as f64, 0.0);
            let d = c.decide(&g, &state(0.0));
            let s = d.tau.unwrap();
            assert_abs_diff_eq!(d.issue.unwrap(), s - 0.5 - 0.25, epsilon = 1e-6);
            last = s;
        }
        // extrema at 1.25, 3.75, 6.25, 8.75: one target per half period
        assert_abs_diff_eq!(last, 8.75, epsilon = 1e-9);
    }

    #[test]
    fn intermittent_defers_when_too_close() {
        let act = ActuationModel {
            speed: 10.0,
            latency_mean: 1.0,
            ..ActuationModel::default()
        };
        let mut c = plan_intermittent(&x_fit(5.0, 0.2), &act, 0.0, Vector3::zeros()).unwrap();
        // first extremum at 1.25 s leaves 0.25 s for 1 s latency + travel: skip to 3.75 s
        let d = c.decide(&Pose6::translation(0.0, 1.0, 0.0), &state(0.0));
        assert_abs_diff_eq!(d.tau.unwrap(), 3.75, epsilon = 1e-9);
        assert_abs_diff_eq!(d.u.tx, -5.0, epsilon = 1e-9);
    }

    #[test]
    fn intermittent_falls_back_when_flat() {
        let act = ActuationModel::default();
        let mut c =
            plan_intermittent(&[SineFit::flat(0.0, 0.0); 6], &act, 0.0, Vector3::zeros()).unwrap();
        assert!(c.fell_back());
        let g = Pose6::translation(1.0, 1.0, 1.0);
        let d = c.decide(&g, &state(0.0));
        assert_eq!(d.u, g);
        assert_eq!(d.issue, None);
    }
}
