use std::f64::consts::PI;

use super::SineFit;
use crate::error::{Error, Result};

/// Slack, in half-period units, so an extremum exactly at `t_start` is kept
/// despite rounding.
const INDEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtremaSchedule {
    /// Alternating maxima and minima, `π/omega` apart.
    pub times: Vec<f64>,
    /// Axis the fit came from, when built by [`dominant_schedule`].
    pub dominant_axis: Option<usize>,
    pub fit: SineFit,
}

/// Index of the largest translational amplitude among non-flat fits. Rotation
/// axes are compared only when every translation axis is flat. Ties go to the
/// lower index.
pub fn dominant_axis(fits: &[SineFit]) -> Result<usize> {
    if fits.len() != 6 {
        return Err(Error::NoFit(fits.len()));
    }
    let best = |range: std::ops::Range<usize>| {
        range
            .filter(|&i| !fits[i].flat)
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(j) if fits[j].alpha >= fits[i].alpha => Some(j),
                _ => Some(i),
            })
    };
    best(0..3).or_else(|| best(3..6)).ok_or(Error::AllFlat)
}

/// Time of the `n`-th extremum: `omega * (t + phi) = π/2 + nπ`.
fn extremum(fit: &SineFit, n: f64) -> f64 {
    (PI / 2.0 + n * PI) / fit.omega - fit.phi
}

fn first_index(fit: &SineFit, t: f64) -> f64 {
    ((fit.omega * (t + fit.phi) - PI / 2.0) / PI - INDEX_TOL).ceil()
}

/// Earliest extremum at or after `t`.
pub fn next_extremum(fit: &SineFit, t: f64) -> Result<f64> {
    if fit.flat {
        return Err(Error::FlatFit);
    }
    Ok(extremum(fit, first_index(fit, t)))
}

pub fn extrema_schedule(fit: &SineFit, t_start: f64, k: usize) -> Result<ExtremaSchedule> {
    if fit.flat {
        return Err(Error::FlatFit);
    }
    let n0 = first_index(fit, t_start);
    Ok(ExtremaSchedule {
        times: (0..k).map(|i| extremum(fit, n0 + i as f64)).collect(),
        dominant_axis: None,
        fit: *fit,
    })
}

pub fn dominant_schedule(fits: &[SineFit], t_start: f64, k: usize) -> Result<ExtremaSchedule> {
    let axis = dominant_axis(fits)?;
    let mut s = extrema_schedule(&fits[axis], t_start, k)?;
    s.dominant_axis = Some(axis);
    Ok(s)
}

/// Half-width around an extremum within which the fitted curve stays within
/// `eps` of its peak value, to second order.
pub fn window_halfwidth(fit: &SineFit, eps: f64) -> Result<f64> {
    if fit.flat || fit.alpha == 0.0 {
        return Err(Error::FlatFit);
    }
    Ok((2.0 * eps / (fit.alpha * fit.omega * fit.omega)).sqrt())
}

/// Displacement caused by a timing error `dt` at peak velocity.
pub fn worst_case_error(fit: &SineFit, dt: f64) -> f64 {
    fit.alpha * fit.omega * dt
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fit(alpha: f64, f: f64, phi: f64) -> SineFit {
        SineFit {
            alpha,
            omega: 2.0 * PI * f,
            phi,
            offset: 0.0,
            rmse: 0.0,
            flat: false,
        }
    }

    fn alphas(a: [f64; 6]) -> Vec<SineFit> {
        a.iter()
            .map(|&x| {
                if x == 0.0 {
                    SineFit::flat(0.0, 0.0)
                } else {
                    fit(x, 0.2, 0.0)
                }
            })
            .collect()
    }

    #[test]
    fn dominant_examples() {
        assert_eq!(
            dominant_axis(&alphas([25.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap(),
            0
        );
        assert_eq!(
            dominant_axis(&alphas([15.0, 20.0, 0.0, 0.0, 0.0, 0.0])).unwrap(),
            1
        );
        assert_eq!(
            dominant_axis(&alphas([10.0, 10.0, 0.0, 0.0, 0.0, 0.0])).unwrap(),
            0
        );
        assert_eq!(
            dominant_axis(&alphas([1.0, 0.0, 0.0, 30.0, 0.0, 0.0])).unwrap(),
            0
        );
        assert_eq!(
            dominant_axis(&alphas([0.0, 0.0, 0.0, 3.0, 5.0, 0.0])).unwrap(),
            4
        );
        assert!(matches!(
            dominant_axis(&alphas([0.0; 6])),
            Err(Error::AllFlat)
        ));
        assert!(matches!(
            dominant_axis(&alphas([0.0; 6])[..3]),
            Err(Error::NoFit(3))
        ));
    }

    #[test]
    fn schedule_examples() {
        let s = extrema_schedule(&fit(1.0, 0.2, 0.0), 0.0, 3).unwrap();
        for (got, want) in s.times.iter().zip([1.25, 3.75, 6.25]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let s = extrema_schedule(&fit(1.0, 0.5, 0.0), 0.0, 2).unwrap();
        assert_abs_diff_eq!(s.times[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.times[1], 1.5, epsilon = 1e-12);
        let s = extrema_schedule(&fit(1.0, 0.2, 1.25), 0.0, 1).unwrap();
        assert_abs_diff_eq!(s.times[0], 0.0, epsilon = 1e-12);
        assert!(matches!(
            extrema_schedule(&SineFit::flat(0.0, 0.0), 0.0, 1),
            Err(Error::FlatFit)
        ));
    }

    #[test]
    fn window_examples() {
        let f = SineFit {
            omega: 0.4 * PI,
            ..fit(5.0, 0.2, 0.0)
        };
        let expected = (2.0 / (5.0 * (0.4 * PI).powi(2))).sqrt();
        assert_abs_diff_eq!(
            window_halfwidth(&f, 1.0).unwrap(),
            expected,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(window_halfwidth(&f, 1.0).unwrap(), 0.5033, epsilon = 1e-4);
        assert!(window_halfwidth(&f, 1e-12).unwrap() < 1e-5);
        let doubled = SineFit { alpha: 10.0, ..f };
        let ratio = window_halfwidth(&doubled, 1.0).unwrap().powi(2)
            / window_halfwidth(&f, 1.0).unwrap().powi(2);
        assert_abs_diff_eq!(ratio, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn worst_case_examples() {
        let f = fit(5.0, 0.2, 0.0);
        assert_eq!(worst_case_error(&f, 0.0), 0.0);
        assert_abs_diff_eq!(worst_case_error(&f, 0.576), 3.619, epsilon = 1e-3);
        assert_abs_diff_eq!(worst_case_error(&f, 0.22), 1.382, epsilon = 1e-3);
    }

    proptest! {
        #[test]
        fn extrema_have_zero_slope(
            alpha in 0.5..50.0f64, f in 0.05..1.0f64, phi in 0.0..20.0f64,
            t0 in -50.0..50.0f64, k in 1usize..20,
        ) {
            let fit = fit(alpha, f, phi);
            let s = extrema_schedule(&fit, t0, k).unwrap();
            prop_assert!(s.times[0] >= t0 - 1e-9);
            prop_assert!(s.times[0] - t0 < 0.5 / f + 1e-9);
            for w in s.times.windows(2) {
                prop_assert!((w[1] - w[0] - PI / fit.omega).abs() < 1e-9);
            }
            for &t in &s.times {
                prop_assert!((alpha * fit.omega * (fit.omega * (t + phi)).cos()).abs() < 1e-9 * alpha.max(1.0) * fit.omega.max(1.0) * (1.0 + t.abs()));
            }
        }

        #[test]
        fn worst_case_matches_peak_velocity_displacement(
            alpha in 0.5..50.0f64, f in 0.05..1.0f64, phi in 0.0..5.0f64, frac in 0.0..0.01f64,
        ) {
            let fit = fit(alpha, f, phi);
            let dt = frac / f;
            // zero crossing of the sine = peak velocity
            let s = -phi;
            let moved = (fit.displacement(s + dt) - fit.displacement(s)).abs();
            let bound = worst_case_error(&fit, dt);
            prop_assert!((moved - bound).abs() <= 0.01 * bound + 1e-12);
        }
    }
}
