//! Procedural background clips.

use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::clip::{Clip, CHANNELS};
use crate::math;
use crate::seed;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClipKind {
    /// Independent uniform pixels in every frame.
    UniformNoise,
    /// A sinusoidal pattern translating cyclically at an integer velocity.
    MovingGradient,
    /// Three to six colored Gaussian blobs on straight drifts.
    DriftingBlobs,
    /// One noise frame repeated.
    StaticTexture,
}

impl ClipKind {
    pub const ALL: [ClipKind; 4] = [
        ClipKind::UniformNoise,
        ClipKind::MovingGradient,
        ClipKind::DriftingBlobs,
        ClipKind::StaticTexture,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClipKind::UniformNoise => "uniform-noise",
            ClipKind::MovingGradient => "moving-gradient",
            ClipKind::DriftingBlobs => "drifting-blobs",
            ClipKind::StaticTexture => "static-texture",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        ClipKind::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::config(alloc::format!("unknown clip kind `{name}`")))
    }
}

/// `(frames, height, width)`.
pub type ClipShape = (usize, usize, usize);

pub fn gen_clip(kind: ClipKind, shape: ClipShape, seed: u64) -> Result<Clip> {
    let (frames, h, w) = shape;
    let mut clip = Clip::zeros(frames, h, w)?;
    let mut rng = seed::rng(seed);
    match kind {
        ClipKind::UniformNoise => rng.fill(clip.data_mut()),
        ClipKind::StaticTexture => {
            let mut first = alloc::vec![0u8; clip.frame_len()];
            rng.fill(first.as_mut_slice());
            for t in 0..frames {
                clip.frame_mut(t).copy_from_slice(&first);
            }
        }
        ClipKind::MovingGradient => moving_gradient(&mut clip, &mut rng),
        ClipKind::DriftingBlobs => drifting_blobs(&mut clip, &mut rng),
    }
    Ok(clip)
}

/// The per-frame translation of a moving-gradient clip, `(dx, dy)`.
pub fn gradient_velocity(seed: u64) -> (i64, i64) {
    let mut rng = seed::rng(seed);
    (rng.gen_range(-2..=2), rng.gen_range(-2..=2))
}

fn moving_gradient(clip: &mut Clip, rng: &mut seed::Rng) {
    let (frames, h, w) = clip.shape();
    // Same draw order as `gradient_velocity`.
    let (vx, vy) = (rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2));
    let mut waves = [(0i64, 0i64, 0.0f64); CHANNELS];
    for wave in waves.iter_mut() {
        *wave = (
            rng.gen_range(1..=3),
            rng.gen_range(0..=2),
            rng.gen_range(0.0..core::f64::consts::TAU),
        );
    }
    let (wi, hi) = (w as i64, h as i64);
    for t in 0..frames {
        let ti = t as i64;
        for y in 0..h {
            let ys = (y as i64 - vy * ti).rem_euclid(hi);
            for x in 0..w {
                let xs = (x as i64 - vx * ti).rem_euclid(wi);
                let mut rgb = [0u8; 3];
                for (c, &(kx, ky, phase)) in waves.iter().enumerate() {
                    let arg = core::f64::consts::TAU
                        * ((kx * xs) as f64 / w as f64 + (ky * ys) as f64 / h as f64)
                        + phase;
                    rgb[c] = math::to_u8((127.5 + 127.5 * math::sin(arg)) as f32);
                }
                clip.set_pixel(t, y, x, rgb);
            }
        }
    }
}

struct Blob {
    x: f64,
    y: f64,
    vx: f64,
    vy: f64,
    radius: f64,
    color: [f64; 3],
}

fn drifting_blobs(clip: &mut Clip, rng: &mut seed::Rng) {
    let (frames, h, w) = clip.shape();
    let (wf, hf) = (w as f64, h as f64);
    let background: [f64; 3] = [
        rng.gen_range(30.0..120.0),
        rng.gen_range(30.0..120.0),
        rng.gen_range(30.0..120.0),
    ];
    let count = rng.gen_range(3..=6);
    let speed = wf.min(hf) / 32.0;
    let blobs: Vec<Blob> = (0..count)
        .map(|_| Blob {
            x: rng.gen_range(0.0..wf),
            y: rng.gen_range(0.0..hf),
            vx: rng.gen_range(-speed..=speed),
            vy: rng.gen_range(-speed..=speed),
            radius: rng.gen_range(0.08..0.2) * wf.min(hf),
            color: [
                rng.gen_range(-100.0..140.0),
                rng.gen_range(-100.0..140.0),
                rng.gen_range(-100.0..140.0),
            ],
        })
        .collect();
    for t in 0..frames {
        let tf = t as f64;
        for y in 0..h {
            for x in 0..w {
                let mut v = background;
                for b in &blobs {
                    let dx = x as f64 + 0.5 - (b.x + b.vx * tf);
                    let dy = y as f64 + 0.5 - (b.y + b.vy * tf);
                    let g = math::exp(-(dx * dx + dy * dy) / (2.0 * b.radius * b.radius));
                    for c in 0..CHANNELS {
                        v[c] += g * b.color[c];
                    }
                }
                clip.set_pixel(t, y, x, v.map(|c| math::to_u8(c as f32)));
            }
        }
    }
}

/// A reproducible set of background videos.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: usize,
    pub shape: ClipShape,
    pub kinds: Vec<(ClipKind, f64)>,
    pub seed: u64,
}

impl CorpusSpec {
    pub fn new(count: usize, shape: ClipShape, seed: u64) -> Self {
        Self {
            count,
            shape,
            kinds: ClipKind::ALL.iter().map(|&k| (k, 1.0)).collect(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::config("a corpus needs at least two videos"));
        }
        if self.kinds.is_empty() || self.kinds.iter().any(|&(_, w)| !(w > 0.0 && w.is_finite())) {
            return Err(Error::config("corpus kind weights must be positive"));
        }
        let (f, h, w) = self.shape;
        if f == 0 || h == 0 || w == 0 {
            return Err(Error::config("corpus clip shape must be positive"));
        }
        Ok(())
    }

    /// Kind and clip seed of entry `index`.
    pub fn entry(&self, index: usize) -> (ClipKind, u64) {
        let mut rng = seed::rng(seed::split_index(self.seed, "corpus-kind", index as u64));
        let total: f64 = self.kinds.iter().map(|&(_, w)| w).sum();
        let mut pick = rng.gen_range(0.0..total);
        let mut kind = self.kinds[self.kinds.len() - 1].0;
        for &(k, w) in &self.kinds {
            if pick < w {
                kind = k;
                break;
            }
            pick -= w;
        }
        (kind, seed::split_index(self.seed, "corpus-clip", index as u64))
    }

    pub fn generate(&self, index: usize) -> Result<Clip> {
        let (kind, s) = self.entry(index);
        gen_clip(kind, self.shape, s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_texture_repeats() {
        let c = gen_clip(ClipKind::StaticTexture, (6, 8, 8), 4).unwrap();
        for t in 1..6 {
            assert_eq!(c.frame(t), c.frame(0));
        }
    }

    #[test]
    fn noise_channel_means() {
        for seed in 0..50 {
            let c = gen_clip(ClipKind::UniformNoise, (16, 32, 32), seed).unwrap();
            let n = (c.data().len() / 3) as f64;
            for ch in 0..3 {
                let mean = c.data().iter().skip(ch).step_by(3).map(|&v| f64::from(v)).sum::<f64>() / n;
                assert!((mean - 127.5).abs() < 3.0, "seed {seed} ch {ch}: {mean}");
            }
        }
    }

    #[test]
    fn gradient_translates_cyclically() {
        for seed in 0..10 {
            let c = gen_clip(ClipKind::MovingGradient, (5, 16, 20), seed).unwrap();
            let (vx, vy) = gradient_velocity(seed);
            for t in 0..4 {
                for y in 0..16i64 {
                    for x in 0..20i64 {
                        let sx = (x - vx).rem_euclid(20) as usize;
                        let sy = (y - vy).rem_euclid(16) as usize;
                        let a = c.pixel(t + 1, y as usize, x as usize);
                        let b = c.pixel(t, sy, sx);
                        for ch in 0..3 {
                            assert!((i16::from(a[ch]) - i16::from(b[ch])).abs() <= 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn blobs_move() {
        let c = gen_clip(ClipKind::DriftingBlobs, (8, 32, 32), 1).unwrap();
        assert_ne!(c.frame(0), c.frame(7));
    }

    #[test]
    fn kind_names_round_trip() {
        for k in ClipKind::ALL {
            assert_eq!(ClipKind::from_name(k.name()).unwrap(), k);
        }
        assert!(ClipKind::from_name("video").is_err());
    }

    #[test]
    fn corpus_entries_deterministic_and_weighted() {
        let mut spec = CorpusSpec::new(50, (4, 8, 8), 3);
        assert_eq!(spec.entry(7), spec.entry(7));
        spec.kinds = alloc::vec![(ClipKind::DriftingBlobs, 1.0)];
        assert!((0..50).all(|i| spec.entry(i).0 == ClipKind::DriftingBlobs));
        spec.count = 1;
        assert!(spec.validate().is_err());
    }
}
