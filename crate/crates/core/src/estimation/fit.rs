use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

use super::periodogram::dominant_peak;
use super::SineFit;
use crate::error::{Error, Result};
use crate::sensing::TrackSeries;

pub const MAX_ITERATIONS: usize = 100;

const MAX_HALVINGS: usize = 40;
const STEP_TOL: f64 = 1e-12;

struct Prepared {
    /// Times shifted to be centered on zero; conditions the phase/frequency coupling.
    tc: Vec<f64>,
    center: f64,
    dt: f64,
}

fn prepare(times: &[f64], values: &[f64]) -> Result<Prepared> {
    if times.len() != values.len() {
        return Err(Error::InvalidSeries(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if times.len() < 8 {
        return Err(Error::NoSamples(format!(
            "{} samples; need at least 8",
            times.len()
        )));
    }
    if times.iter().chain(values).any(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries("non-finite sample".into()));
    }
    let n = times.len();
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if dt <= 0.0 {
        return Err(Error::InvalidSeries("times must increase".into()));
    }
    for w in times.windows(2) {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt {
            return Err(Error::InvalidSeries(
                "samples must be uniformly spaced".into(),
            ));
        }
    }
    let center = 0.5 * (times[0] + times[n - 1]);
    Ok(Prepared {
        tc: times.iter().map(|t| t - center).collect(),
        center,
        dt,
    })
}

fn rmse_of(tc: &[f64], values: &[f64], p: &Vector4<f64>) -> f64 {
    (sse(tc, values, p) / values.len() as f64).sqrt()
}

fn sse(tc: &[f64], values: &[f64], p: &Vector4<f64>) -> f64 {
    tc.iter()
        .zip(values)
        .map(|(t, y)| (p[0] * (p[1] * t + p[2]).sin() + p[3] - y).powi(2))
        .sum()
}

/// Linear least squares for `a sin(wt) + b cos(wt) + c` at fixed `w`,
/// returned as (alpha, theta, offset).
fn linear_fit(tc: &[f64], values: &[f64], omega: f64) -> Option<Vector3<f64>> {
    let mut ata = Matrix3::zeros();
    let mut atb = Vector3::zeros();
    for (t, y) in tc.iter().zip(values) {
        let row = Vector3::new((omega * t).sin(), (omega * t).cos(), 1.0);
        ata += row * row.transpose();
        atb += row * *y;
    }
    let x = ata.cholesky()?.solve(&atb);
    Some(Vector3::new(x[0].hypot(x[1]), x[1].atan2(x[0]), x[2]))
}

fn flat_fit(values: &[f64]) -> SineFit {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let rmse = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    SineFit::flat(mean, rmse)
}

fn to_fit(prep: &Prepared, values: &[f64], p: &Vector4<f64>) -> SineFit {
    let theta = p[2] - p[1] * prep.center;
    SineFit::from_angle(p[0], p[1], theta, p[3], rmse_of(&prep.tc, values, p))
}

fn coarse(times: &[f64], values: &[f64]) -> Result<(Prepared, Option<Vector4<f64>>)> {
    let prep = prepare(times, values)?;
    let peak = match dominant_peak(values, prep.dt) {
        Some(p) if !p.is_flat() => p,
        _ => return Ok((prep, None)),
    };
    let omega = 2.0 * std::f64::consts::PI * peak.frequency;
    let lin = linear_fit(&prep.tc, values, omega)
        .ok_or_else(|| Error::InvalidSeries("singular sine basis".into()))?;
    let p = Vector4::new(lin[0], omega, lin[1], lin[2]);
    Ok((prep, Some(p)))
}

/// Periodogram frequency plus the linear amplitude/phase/offset solve,
/// without joint refinement.
pub fn coarse_fit(times: &[f64], values: &[f64]) -> Result<SineFit> {
    let (prep, p) = coarse(times, values)?;
    Ok(match p {
        Some(p) => to_fit(&prep, values, &p),
        None => flat_fit(values),
    })
}

/// Least-squares sinusoid fit of a uniformly sampled signal. Signals without a
/// detectable oscillation come back as a flat fit rather than an error.
pub fn fit_axis(times: &[f64], values: &[f64]) -> Result<SineFit> {
    let (prep, p) = coarse(times, values)?;
    let Some(mut p) = p else {
        return Ok(flat_fit(values));
    };
    let tc = &prep.tc;
    let mut cost = sse(tc, values, &p);
    for _ in 0..MAX_ITERATIONS {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for (t, y) in tc.iter().zip(values) {
            let arg = p[1] * t + p[2];
            let (s, c) = arg.sin_cos();
            let j = Vector4::new(s, p[0] * t * c, p[0] * c, 1.0);
            let r = y - (p[0] * s + p[3]);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let Some(chol) = jtj.cholesky() else {
            return Err(Error::NonConvergence(MAX_ITERATIONS));
        };
        let step = chol.solve(&jtr);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..MAX_HALVINGS {
            let trial = p + step * scale;
            let c = sse(tc, values, &trial);
            if c <= cost {
                p = trial;
                cost = c;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        let size = (step * scale)
            .component_div(&p.map(|v| v.abs().max(1.0)))
            .amax();
        if !accepted || size < STEP_TOL {
            return Ok(to_fit(&prep, values, &p));
        }
    }
    Err(Error::NonConvergence(MAX_ITERATIONS))
}

/// Fit every pose component independently; failures stay per axis.
pub fn fit_all(track: &TrackSeries) -> Vec<Result<SineFit>> {
    (0..6)
        .map(|axis| fit_axis(&track.times, &track.axis(axis)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motion::RhythmicMotion;
    use crate::sensing::{observe, SensorModel};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn series(alpha: f64, f: f64, phi: f64, offset: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..900).map(|i| i as f64 / 15.0).collect();
        let y = t
            .iter()
            .map(|t| offset + alpha * (2.0 * PI * f * (t + phi)).sin())
            .collect();
        (t, y)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-12)
    }

    #[test]
    fn noiseless_recovery() {
        let (t, y) = series(10.0, 0.2, 0.3, 2.0);
        let fit = fit_axis(&t, &y).unwrap();
        assert!(!fit.flat);
        assert!(rel(fit.alpha, 10.0) < 1e-6);
        assert!(rel(fit.omega, 0.4 * PI) < 1e-6);
        assert!(rel(fit.phi, 0.3) < 1e-6);
        assert!(rel(fit.offset, 2.0) < 1e-6);
        assert!(fit.rmse < 1e-8);
    }

    #[test]
    fn constant_is_flat() {
        let (t, _) = series(0.0, 0.2, 0.0, 0.0);
        let fit = fit_axis(&t, &vec![0.0; t.len()]).unwrap();
        assert!(fit.flat);
        assert_eq!(fit.alpha, 0.0);
    }

    #[test]
    fn fit_all_examples() {
        let s = SensorModel::noiseless();
        let x = RhythmicMotion::sinusoidal([25.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.2, 0.0).unwrap();
        let fits: Vec<SineFit> = fit_all(&observe(&x, &s).unwrap())
            .into_iter()
            .map(Result::unwrap)
            .collect();
        assert!(rel(fits[0].alpha, 25.0) < 1e-6);
        assert!(fits[1..].iter().all(|f| f.flat));

        let xy = RhythmicMotion::sinusoidal([15.0, 20.0, 0.0, 0.0, 0.0, 0.0], 0.2, 0.0).unwrap();
        let fits: Vec<SineFit> = fit_all(&observe(&xy, &s).unwrap())
            .into_iter()
            .map(Result::unwrap)
            .collect();
        assert!(rel(fits[0].alpha, 15.0) < 1e-6);
        assert!(rel(fits[1].alpha, 20.0) < 1e-6);
        assert!(fits[2..].iter().all(|f| f.flat));

        let still = RhythmicMotion::stationary();
        let fits = fit_all(&observe(&still, &s).unwrap());
        assert!(fits.iter().all(|f| f.as_ref().unwrap().flat));
    }

    #[test]
    fn rejects_bad_series() {
        assert!(matches!(
            fit_axis(&[0.0, 1.0], &[0.0, 1.0]),
            Err(Error::NoSamples(_))
        ));
        let t: Vec<f64> = (0..20).map(|i| (i * i) as f64).collect();
        assert!(matches!(
            fit_axis(&t, &[0.0; 20]),
            Err(Error::InvalidSeries(_))
        ));
    }

    #[test]
    fn phase_normalized() {
        let (t, y) = series(4.0, 0.25, -1.0, 0.0);
        let fit = fit_axis(&t, &y).unwrap();
        // -1 s wraps to 3 s on a 4 s period
        assert!((fit.phi - 3.0).abs() < 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn recovers_noiseless_parameters(
            alpha in 1.0..50.0f64,
            f in 0.05..0.45f64,
            frac in 0.0..1.0f64,
            offset in -20.0..20.0f64,
        ) {
            let phi = frac / f;
            let (t, y) = series(alpha, f, phi, offset);
            let fit = fit_axis(&t, &y).unwrap();
            prop_assert!(rel(fit.alpha, alpha) < 1e-5);
            prop_assert!(rel(fit.omega, 2.0 * PI * f) < 1e-5);
            prop_assert!(rel(fit.offset, offset) < 1e-5 || (fit.offset - offset).abs() < 1e-6);
            // compare phase on the circle
            let period = 1.0 / f;
            let d = (fit.phi - phi).rem_euclid(period);
            prop_assert!(d.min(period - d) < 1e-5 * period);
        }

        #[test]
        fn refinement_never_worsens_rmse(
            alpha in 1.0..30.0f64,
            f in 0.07..0.45f64,
            seed in 0u64..1000,
        ) {
            let m = RhythmicMotion::sinusoidal([alpha, 0.0, 0.0, 0.0, 0.0, 0.0], f, 0.0).unwrap();
            let s = SensorModel { sigma_trans: 1.0, seed, ..SensorModel::default() };
            let ts = observe(&m, &s).unwrap();
            let x = ts.axis(0);
            let coarse = coarse_fit(&ts.times, &x).unwrap();
            let fine = fit_axis(&ts.times, &x).unwrap();
            prop_assert!(fine.rmse <= coarse.rmse + 1e-12);
        }
    }
}
