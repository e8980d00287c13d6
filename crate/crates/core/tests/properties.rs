//! Cross-module invariants of the controllers and tasks.

use proptest::prelude::*;

use rsync_sim::control::{ActuationModel, Policy};
use rsync_sim::motion::{PlatformVariation, RhythmicMotion};
use rsync_sim::sensing::SensorModel;
use rsync_sim::tasks::{run_cutting, CuttingTask, Environment, TrialReport};

fn cut(env: &Environment, policy: Policy, seed: u64) -> TrialReport {
    run_cutting(&CuttingTask::default(), env, policy, seed).unwrap()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn zero_amplitude_policies_agree_without_noise() {
    let m = RhythmicMotion::sinusoidal([0.0; 6], 0.3, 0.0).unwrap();
    let env = Environment {
        sensor: SensorModel::noiseless(),
        ..Environment::new(m)
    };
    for seed in 0..10 {
        let r: Vec<TrialReport> = Policy::ALL.iter().map(|&p| cut(&env, p, seed)).collect();
        for x in &r[1..] {
            assert!((x.cumulative_error - r[0].cumulative_error).abs() <= 1e-9);
            assert!((x.max_error.unwrap() - r[0].max_error.unwrap()).abs() <= 1e-9);
        }
    }
}

#[test]
fn calibrated_dominance_over_fifty_trials() {
    let m = RhythmicMotion::sinusoidal([25.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.2, 0.0).unwrap();
    let env = Environment::new(m);
    let med = |p| {
        median(
            (0..50)
                .map(|s| cut(&env, p, 500 + s).cumulative_error)
                .collect(),
        )
    };
    let (none, full, int) = (
        med(Policy::None),
        med(Policy::Full),
        med(Policy::Intermittent),
    );
    assert!(int < full && full < none, "{int} {full} {none}");
}

#[test]
fn duration_never_shrinks_with_more_synchronization() {
    let m = RhythmicMotion::sinusoidal([25.0, 0.0, 0.0, 0.0, 0.0, 0.0], 0.2, 0.0).unwrap();
    let env = Environment::new(m);
    for seed in 0..20 {
        let d: Vec<f64> = Policy::ALL
            .iter()
            .map(|&p| cut(&env, p, seed).duration)
            .collect();
        assert!(d[0] <= d[1] && d[1] <= d[2], "seed {seed}: {d:?}");
    }
}

#[test]
fn mean_error_grows_with_frequency() {
    let mut last = 0.0;
    for f in [0.0, 0.1, 0.2, 0.25, 0.3] {
        let m = RhythmicMotion::sinusoidal([5.0, 0.0, 0.0, 0.0, 0.0, 0.0], f, 0.0).unwrap();
        let env = Environment::new(m);
        let mean = (0..30)
            .map(|s| cut(&env, Policy::Intermittent, s).max_error.unwrap())
            .sum::<f64>()
            / 30.0;
        assert!(mean >= last, "{f} Hz: {mean} < {last}");
        last = mean;
    }
}

#[test]
fn breathing_motion_runs_and_is_reported() {
    let axes = [rsync_sim::motion::AxisMotion {
        kind: rsync_sim::motion::WaveformKind::Breathing,
        amplitude: 8.0,
    }; 6];
    let m = RhythmicMotion::new(0.2, 0.0, axes).unwrap();
    let env = Environment::new(m);
    for p in Policy::ALL {
        let r = cut(&env, p, 1);
        assert!(r.max_error.unwrap().is_finite() && r.duration > 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn zero_amplitude_equivalence_under_noise(seed in 0u64..100_000, f in 0.05..0.45f64) {
        let m = RhythmicMotion::sinusoidal([0.0; 6], f, 0.0).unwrap();
        let env = Environment::new(m);
        let r: Vec<TrialReport> = Policy::ALL.iter().map(|&p| cut(&env, p, seed)).collect();
        for x in &r[1..] {
            prop_assert!((x.cumulative_error - r[0].cumulative_error).abs() <= 1e-9);
        }
    }

    #[test]
    fn ideal_intermittent_is_exact(seed in 0u64..1000, a in 1.0..25.0f64, f in 0.1..0.3f64) {
        let m = RhythmicMotion::sinusoidal([a, 0.0, 0.0, 0.0, 0.0, 0.0], f, 0.0).unwrap();
        let env = Environment {
            variation: PlatformVariation::NONE,
            sensor: SensorModel::noiseless(),
            actuation: ActuationModel { latency_jitter: 0.0, ..ActuationModel::default() },
            motion: m,
        };
        let r = cut(&env, Policy::Intermittent, seed);
        prop_assert!(r.finished);
        prop_assert!(r.max_error.unwrap() < 1e-6);
    }
}
