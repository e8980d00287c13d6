//! Per-axis sinusoid estimation and the timing quantities derived from it.
//!
//! Each pose component is modeled as `offset + alpha * sin(omega * (t + phi))`.

mod fit;
pub mod periodogram;
mod schedule;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use fit::{coarse_fit, fit_all, fit_axis, MAX_ITERATIONS};
pub use schedule::{
    dominant_axis, dominant_schedule, extrema_schedule, next_extremum, window_halfwidth,
    worst_case_error, ExtremaSchedule,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SineFit {
    /// Amplitude, mm or degrees; never negative.
    pub alpha: f64,
    /// Angular frequency, rad/s.
    pub omega: f64,
    /// Phase, seconds, in `[0, 2π/omega)`.
    pub phi: f64,
    pub offset: f64,
    pub rmse: f64,
    /// No detectable oscillation: `alpha` and `omega` are 0 and the fit is the mean.
    pub flat: bool,
}

impl SineFit {
    pub fn flat(offset: f64, rmse: f64) -> Self {
        SineFit {
            alpha: 0.0,
            omega: 0.0,
            phi: 0.0,
            offset,
            rmse,
            flat: true,
        }
    }

    /// Build a fit from the phase-angle form `alpha * sin(omega * t + theta)`,
    /// normalizing the sign of `alpha` and the range of `phi`.
    pub fn from_angle(alpha: f64, omega: f64, theta: f64, offset: f64, rmse: f64) -> Self {
        let (alpha, theta) = if alpha < 0.0 {
            (-alpha, theta + PI)
        } else {
            (alpha, theta)
        };
        let period = 2.0 * PI / omega;
        let mut phi = (theta / omega).rem_euclid(period);
        if phi >= period {
            phi = 0.0;
        }
        SineFit {
            alpha,
            omega,
            phi,
            offset,
            rmse,
            flat: false,
        }
    }

    pub fn frequency(&self) -> f64 {
        self.omega / (2.0 * PI)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.displacement(t)
    }

    /// `eval(t) - offset`: the oscillating part only.
    pub fn displacement(&self, t: f64) -> f64 {
        if self.flat {
            0.0
        } else {
            self.alpha * (self.omega * (t + self.phi)).sin()
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        if self.flat {
            0.0
        } else {
            self.alpha * self.omega * (self.omega * (t + self.phi)).cos()
        }
    }
}
