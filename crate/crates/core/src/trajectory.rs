//! Patch center paths.
//!
//! Frames are 0-based throughout this module: the first frame is `0` and the
//! last is `frames - 1`. Keyframe sets always contain both.

use alloc::vec::Vec;

use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::seed;
use crate::{Error, Result};

/// Rejection-sampling cap per keyframe for linear motion.
pub const KEYFRAME_RETRY_CAP: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        math::sqrt(dx * dx + dy * dy)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }
}

/// One center per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub centers: Vec<Point>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn in_bounds(&self, width: f64, height: f64) -> bool {
        self.centers
            .iter()
            .all(|p| (0.0..=width).contains(&p.x) && (0.0..=height).contains(&p.y))
    }
}

/// Strictly increasing 0-based frame indices, starting at `0` and ending at
/// `frames - 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyframeSet {
    indices: Vec<usize>,
}

impl KeyframeSet {
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, frame: usize) -> bool {
        self.indices.binary_search(&frame).is_ok()
    }

    /// The keyframe pair `(k, k+1)` bracketing `frame` and the fraction of the
    /// way from the first to the second.
    pub fn bracket(&self, frame: usize) -> (usize, usize, f64) {
        match self.indices.binary_search(&frame) {
            Ok(pos) => (pos, pos, 0.0),
            Err(pos) => {
                let (a, b) = (self.indices[pos - 1], self.indices[pos]);
                (pos - 1, pos, (frame - a) as f64 / (b - a) as f64)
            }
        }
    }
}

/// Draw `count` keyframes out of `frames`: the two endpoints plus
/// `count - 2` distinct interior frames chosen uniformly.
pub fn sample_keyframes(frames: usize, count: usize, seed: u64) -> Result<KeyframeSet> {
    if count < 2 {
        return Err(Error::config("keyframe count must be at least 2"));
    }
    if count > frames {
        return Err(Error::config(alloc::format!(
            "keyframe count {count} exceeds frame count {frames}"
        )));
    }
    let mut rng = seed::rng(seed);
    let mut indices = Vec::with_capacity(count);
    indices.push(0);
    let interior = frames - 2;
    indices.extend(index::sample(&mut rng, interior, count - 2).iter().map(|i| i + 1));
    indices.push(frames - 1);
    indices.sort_unstable();
    Ok(KeyframeSet { indices })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MotionKind {
    Static,
    Linear,
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionConfig {
    pub kind: MotionKind,
    pub frames: usize,
    pub width: f64,
    pub height: f64,
    pub keyframes: usize,
    /// Two-sided bound on the Euclidean distance between consecutive
    /// keyframe centers, in pixels.
    pub delta_min: f64,
    pub delta_max: f64,
    /// Number of raw samples drawn before smoothing (non-linear only).
    pub oversample: usize,
    /// Smoothing kernel standard deviation in samples (non-linear only).
    pub sigma: f64,
}

impl MotionConfig {
    /// Defaults for a `frames × height × width` clip; `delta` is in pixels.
    pub fn new(kind: MotionKind, frames: usize, height: f64, width: f64) -> Self {
        Self {
            kind,
            frames,
            width,
            height,
            keyframes: 3,
            delta_min: 40.0 * width.min(height) / 112.0,
            delta_max: 80.0 * width.min(height) / 112.0,
            oversample: 48,
            sigma: 8.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::config("frame count must be positive"));
        }
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::config("frame dimensions must be positive"));
        }
        if self.keyframes < 2 {
            return Err(Error::config("keyframe count must be at least 2"));
        }
        if self.oversample <= self.frames {
            return Err(Error::config(alloc::format!(
                "oversample count {} must exceed frame count {}",
                self.oversample,
                self.frames
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(Error::config("sigma must be positive"));
        }
        if !(self.delta_min > 0.0 && self.delta_min <= self.delta_max) {
            return Err(Error::config("need 0 < delta_min <= delta_max"));
        }
        Ok(())
    }
}

/// Dispatch on `cfg.kind`.
pub fn generate(cfg: &MotionConfig, seed: u64) -> Result<Trajectory> {
    match cfg.kind {
        MotionKind::Static => static_trajectory(cfg, seed),
        MotionKind::Linear => linear_trajectory(cfg, seed),
        MotionKind::Nonlinear => nonlinear_trajectory(cfg, seed),
    }
}

fn expect_kind(cfg: &MotionConfig, kind: MotionKind) -> Result<()> {
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(Error::config(alloc::format!(
            "expected {kind:?} motion config, got {:?}",
            cfg.kind
        )));
    }
    Ok(())
}

fn uniform_point(rng: &mut seed::Rng, width: f64, height: f64) -> Point {
    Point::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height))
}

pub fn static_trajectory(cfg: &MotionConfig, seed: u64) -> Result<Trajectory> {
    expect_kind(cfg, MotionKind::Static)?;
    let mut rng = seed::rng(seed::split(seed, "static"));
    let p = uniform_point(&mut rng, cfg.width, cfg.height);
    Ok(Trajectory {
        centers: alloc::vec![p; cfg.frames],
    })
}

/// Keyframe centers with consecutive displacement in
/// `[delta_min, delta_max]`, linearly interpolated in between.
pub fn linear_trajectory(cfg: &MotionConfig, seed: u64) -> Result<Trajectory> {
    let (keys, anchors) = linear_keyframes(cfg, seed)?;
    Ok(interpolate_keyframes(&keys, &anchors, cfg.frames))
}

/// The keyframes and their centers behind [`linear_trajectory`].
pub fn linear_keyframes(cfg: &MotionConfig, seed: u64) -> Result<(KeyframeSet, Vec<Point>)> {
    expect_kind(cfg, MotionKind::Linear)?;
    let keys = sample_keyframes(cfg.frames, cfg.keyframes, seed::split(seed, "keyframes"))?;
    let mut rng = seed::rng(seed::split(seed, "centers"));

    let mut anchors = Vec::with_capacity(keys.len());
    anchors.push(uniform_point(&mut rng, cfg.width, cfg.height));
    let mut attempts = 0;
    for _ in 1..keys.len() {
        let prev = *anchors.last().unwrap();
        let mut accepted = None;
        for _ in 0..KEYFRAME_RETRY_CAP {
            attempts += 1;
            let candidate = uniform_point(&mut rng, cfg.width, cfg.height);
            let d = prev.distance(candidate);
            if d >= cfg.delta_min && d <= cfg.delta_max {
                accepted = Some(candidate);
                break;
            }
        }
        match accepted {
            Some(p) => anchors.push(p),
            None => {
                return Err(Error::GenerationFailed {
                    attempts,
                    what: "keyframe center within displacement bounds",
                })
            }
        }
    }
    Ok((keys, anchors))
}

/// Expand keyframe anchors to one center per frame.
pub fn interpolate_keyframes(keys: &KeyframeSet, anchors: &[Point], frames: usize) -> Trajectory {
    debug_assert_eq!(keys.len(), anchors.len());
    let centers = (0..frames)
        .map(|i| {
            let (a, b, t) = keys.bracket(i);
            if a == b {
                anchors[a]
            } else {
                anchors[a].lerp(anchors[b], t)
            }
        })
        .collect();
    Trajectory { centers }
}

/// `oversample` uniform points, Gaussian-smoothed per axis, resampled to
/// `frames` points and clamped into the frame.
pub fn nonlinear_trajectory(cfg: &MotionConfig, seed: u64) -> Result<Trajectory> {
    expect_kind(cfg, MotionKind::Nonlinear)?;
    let raw = raw_nonlinear_samples(cfg, seed);
    let xs: Vec<f64> = raw.iter().map(|p| p.x).collect();
    let ys: Vec<f64> = raw.iter().map(|p| p.y).collect();
    let xs = resample(&gaussian_smooth(&xs, cfg.sigma), cfg.frames);
    let ys = resample(&gaussian_smooth(&ys, cfg.sigma), cfg.frames);
    let centers = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| Point::new(x.clamp(0.0, cfg.width), y.clamp(0.0, cfg.height)))
        .collect();
    Ok(Trajectory { centers })
}

/// The unsmoothed samples [`nonlinear_trajectory`] starts from.
pub fn raw_nonlinear_samples(cfg: &MotionConfig, seed: u64) -> Vec<Point> {
    let mut rng = seed::rng(seed::split(seed, "nonlinear"));
    (0..cfg.oversample)
        .map(|_| uniform_point(&mut rng, cfg.width, cfg.height))
        .collect()
}

/// Normalized discrete Gaussian, radius `ceil(3 sigma)`; index `radius` is
/// the center tap.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = math::ceil(3.0 * sigma) as isize;
    let denom = 2.0 * sigma * sigma;
    let mut w: Vec<f64> = (-radius..=radius)
        .map(|k| math::exp(-((k * k) as f64) / denom))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Map any integer onto `0..n` by mirror reflection with the edge sample
/// repeated (`d c b a | a b c d | d c b a`).
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m < n { m } else { period - 1 - m }) as usize
}

/// Convolve with [`gaussian_kernel`] using reflect padding.
pub fn gaussian_smooth(values: &[f64], sigma: f64) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;
    (0..n as isize)
        .map(|i| {
            kernel
                .iter()
                .enumerate()
                .map(|(j, w)| w * values[reflect(i + j as isize - radius, n)])
                .sum()
        })
        .collect()
}

/// Evaluate the piecewise-linear interpolant of `values` at `len` uniformly
/// spaced positions over `[0, values.len() - 1]`, endpoints included.
pub fn resample(values: &[f64], len: usize) -> Vec<f64> {
    let n = values.len();
    if n == 0 || len == 0 {
        return Vec::new();
    }
    if len == 1 || n == 1 {
        return alloc::vec![values[0]; len];
    }
    let step = (n - 1) as f64 / (len - 1) as f64;
    (0..len)
        .map(|i| {
            if i == len - 1 {
                return values[n - 1];
            }
            let pos = i as f64 * step;
            let lo = math::floor(pos) as usize;
            let lo = lo.min(n - 2);
            let t = pos - lo as f64;
            values[lo] + t * (values[lo + 1] - values[lo])
        })
        .collect()
}

/// Mean squared second difference along both axes, a roughness measure.
pub fn mean_squared_second_difference(points: &[Point]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let total: f64 = points
        .windows(3)
        .map(|w| {
            let ax = w[2].x - 2.0 * w[1].x + w[0].x;
            let ay = w[2].y - 2.0 * w[1].y + w[0].y;
            ax * ax + ay * ay
        })
        .sum();
    total / (points.len() - 2) as f64
}
