//! Zero-padded FFT periodogram used to seed the sine fit.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Padding factor relative to the sample count.
pub const PAD_FACTOR: usize = 8;

/// Peak power below this fraction of the total is treated as no oscillation.
pub const MIN_RELATIVE_POWER: f64 = 1e-6;

/// Peak power must exceed the estimated noise floor by this factor. With a
/// few hundred independent bins the largest pure-noise bin rarely exceeds
/// ten times the floor, so 30 keeps sensor noise on a still axis from being
/// mistaken for motion.
pub const MIN_SIGNIFICANCE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Interpolated peak frequency, Hz.
    pub frequency: f64,
    /// Peak power over (padded length × signal energy); about ½ for a clean sinusoid.
    pub relative_power: f64,
    /// Peak power over the median-based noise floor estimate.
    pub significance: f64,
}

impl Peak {
    pub fn is_flat(&self) -> bool {
        self.relative_power < MIN_RELATIVE_POWER || self.significance < MIN_SIGNIFICANCE
    }
}

/// Periodogram peak of a mean-removed, uniformly sampled signal. Returns
/// `None` when the signal has no energy at all.
pub fn dominant_peak(values: &[f64], dt: f64) -> Option<Peak> {
    let n = values.len();
    if n < 4 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let energy: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    if energy.is_nan() || energy <= 0.0 {
        return None;
    }
    let len = (PAD_FACTOR * n).next_power_of_two();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);

    let power: Vec<f64> = buf[..=len / 2].iter().map(|c| c.norm_sqr()).collect();
    let (k, &peak) = power
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))?;

    let offset = if k + 1 < power.len() {
        let (a, b, c) = (power[k - 1], peak, power[k + 1]);
        let denom = a - 2.0 * b + c;
        if denom < 0.0 {
            (0.5 * (a - c) / denom).clamp(-0.5, 0.5)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let frequency = (k as f64 + offset) / (len as f64 * dt);

    let mut sorted = power[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    // Median of an exponential variate is its mean times ln 2.
    let floor = sorted[sorted.len() / 2] / std::f64::consts::LN_2;
    let significance = if floor > 0.0 {
        peak / floor
    } else {
        f64::INFINITY
    };

    Some(Peak {
        frequency,
        relative_power: peak / (len as f64 * energy),
        significance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    fn sampled(f: f64, a: f64, n: usize, dt: f64) -> Vec<f64> {
        (0..n)
            .map(|i| a * (2.0 * PI * f * i as f64 * dt + 0.3).sin())
            .collect()
    }

    #[test]
    fn peak_frequency_within_half_percent() {
        for f in [0.07, 0.13, 0.2, 0.31, 0.45] {
            let p = dominant_peak(&sampled(f, 3.0, 900, 1.0 / 15.0), 1.0 / 15.0).unwrap();
            assert!(
                (p.frequency / f - 1.0).abs() < 0.005,
                "{f}: {}",
                p.frequency
            );
            assert!(!p.is_flat());
        }
    }

    #[test]
    fn constant_has_no_peak() {
        assert!(dominant_peak(&[2.0; 100], 0.1).is_none());
    }

    #[test]
    fn pure_noise_is_flat() {
        let normal = Normal::new(0.0, 0.5).unwrap();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v: Vec<f64> = (0..900).map(|_| normal.sample(&mut rng)).collect();
            assert!(
                dominant_peak(&v, 1.0 / 15.0).unwrap().is_flat(),
                "seed {seed}"
            );
        }
    }
}
