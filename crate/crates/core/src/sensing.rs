//! Simulated marker tracking: the platform pose sampled at a fixed frame rate
//! with additive Gaussian noise, plus the track CSV format.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motion::{MotionSource, Pose6};
use crate::rng::{self, Stream};

pub const TRACK_HEADER: [&str; 7] = ["t", "tx", "ty", "tz", "rx", "ry", "rz"];

/// Observation must cover at least this many motion periods.
pub const MIN_PERIODS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorModel {
    pub fps: f64,
    /// Observation length in seconds.
    pub duration: f64,
    /// Per-axis translational noise std, mm.
    pub sigma_trans: f64,
    /// Per-axis rotational noise std, degrees.
    pub sigma_rot: f64,
    /// Reserved; must be 0.
    pub outlier_fraction: f64,
    /// Noise seed. Scenario runs overwrite it with the trial seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            fps: 15.0,
            duration: 60.0,
            sigma_trans: 0.5,
            sigma_rot: 0.3,
            outlier_fraction: 0.0,
            seed: 0,
        }
    }
}

impl SensorModel {
    pub fn noiseless() -> Self {
        SensorModel {
            sigma_trans: 0.0,
            sigma_rot: 0.0,
            ..SensorModel::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            (
                "sensor.fps",
                self.fps > 0.0 && self.fps.is_finite(),
                "must be finite and > 0",
            ),
            (
                "sensor.duration",
                self.duration > 0.0 && self.duration.is_finite(),
                "must be finite and > 0",
            ),
            (
                "sensor.sigma_trans",
                self.sigma_trans >= 0.0 && self.sigma_trans.is_finite(),
                "must be finite and >= 0",
            ),
            (
                "sensor.sigma_rot",
                self.sigma_rot >= 0.0 && self.sigma_rot.is_finite(),
                "must be finite and >= 0",
            ),
            (
                "sensor.outlier_fraction",
                self.outlier_fraction == 0.0,
                "outliers are not supported; must be 0",
            ),
        ];
        for (path, ok, reason) in checks {
            if !ok {
                return Err(Error::validation(path, reason));
            }
        }
        Ok(())
    }

    /// Frame rate and observation length requirements for motion at
    /// `frequency`; 0 means a still platform with nothing to resolve.
    pub fn check_motion(&self, frequency: f64) -> Result<()> {
        if frequency <= 0.0 {
            return Ok(());
        }
        if self.fps <= 2.0 * frequency {
            return Err(Error::NyquistViolation {
                fps: self.fps,
                frequency,
            });
        }
        if self.duration * frequency < MIN_PERIODS {
            return Err(Error::NoSamples(format!(
                "{} s of observation covers fewer than {MIN_PERIODS} periods of {frequency} Hz motion",
                self.duration
            )));
        }
        Ok(())
    }

    pub fn frame_count(&self) -> usize {
        (self.fps * self.duration + 1e-9).floor() as usize
    }
}

/// Timestamped poses; strictly increasing times.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrackSeries {
    pub times: Vec<f64>,
    pub poses: Vec<Pose6>,
}

impl TrackSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn axis(&self, axis: usize) -> Vec<f64> {
        self.poses.iter().map(|p| p.get(axis)).collect()
    }
}

pub fn observe(m: &dyn MotionSource, s: &SensorModel) -> Result<TrackSeries> {
    s.validate()?;
    s.check_motion(if m.is_static() { 0.0 } else { m.frequency() })?;
    let n = s.frame_count();
    let mut rng = rng::stream(s.seed, Stream::Sensor);
    let trans = Normal::new(0.0, s.sigma_trans).expect("validated sigma");
    let rot = Normal::new(0.0, s.sigma_rot).expect("validated sigma");
    let mut times = Vec::with_capacity(n);
    let mut poses = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 / s.fps;
        let mut v = m.pose_at(t).to_array();
        for (k, x) in v.iter_mut().enumerate() {
            let noise = if k < 3 {
                trans.sample(&mut rng)
            } else {
                rot.sample(&mut rng)
            };
            *x += noise;
        }
        times.push(t);
        poses.push(Pose6::from_array(v));
    }
    Ok(TrackSeries { times, poses })
}

pub fn write_track_to<W: Write>(ts: &TrackSeries, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACK_HEADER)?;
    for (t, p) in ts.times.iter().zip(&ts.poses) {
        let mut row = vec![t.to_string()];
        row.extend(p.to_array().iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_track(ts: &TrackSeries, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_track_to(ts, file).map_err(|e| Error::io(path, csv_io(e)))
}

pub fn read_track(path: &Path) -> Result<TrackSeries> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_track_from(file, path)
}

/// Parse a track CSV; `path` is used only for error messages.
pub fn read_track_from<R: Read>(input: R, path: &Path) -> Result<TrackSeries> {
    let malformed = |row: usize, reason: String| Error::Malformed {
        path: path.to_path_buf(),
        row,
        reason,
    };
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = r.records();
    let header = match records.next() {
        None => return Err(malformed(1, "missing header".into())),
        Some(h) => h.map_err(|e| malformed(1, e.to_string()))?,
    };
    if header.iter().ne(TRACK_HEADER.iter().copied()) {
        return Err(malformed(
            1,
            format!("expected header {}", TRACK_HEADER.join(",")),
        ));
    }
    let mut ts = TrackSeries::default();
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| malformed(row, e.to_string()))?;
        if rec.len() != 7 {
            return Err(malformed(
                row,
                format!("expected 7 fields, got {}", rec.len()),
            ));
        }
        let mut v = [0.0; 7];
        for (k, field) in rec.iter().enumerate() {
            v[k] = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| {
                    malformed(
                        row,
                        format!("column {}: not a finite number: {field:?}", TRACK_HEADER[k]),
                    )
                })?;
        }
        if let Some(&last) = ts.times.last() {
            if v[0] <= last {
                return Err(malformed(row, "times must be strictly increasing".into()));
            }
        }
        ts.times.push(v[0]);
        ts.poses
            .push(Pose6::new(v[1], v[2], v[3], v[4], v[5], v[6]));
    }
    if ts.is_empty() {
        return Err(Error::NoSamples(format!(
            "{} has a header but no rows",
            path.display()
        )));
    }
    Ok(ts)
}

pub(crate) fn csv_io(e: csv::Error) -> std::io::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    }
}
