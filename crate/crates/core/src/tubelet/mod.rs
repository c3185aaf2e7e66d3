//! Pseudo-object patches and their rendering along a trajectory.

mod transform;
mod warp;

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::clip::{Clip, CHANNELS};
use crate::seed;
use crate::trajectory::{Point, Trajectory};
use crate::{Error, Result};

pub use transform::{
    sample_transform_track, Affine, Theta, TransformBounds, TransformKind, TransformTrack,
};
pub use warp::{warp, warp_affine, DEGENERATE_DET};

/// An `height × width` RGB patch with a coverage mask. Pixels are stored as
/// reals so warped values keep full precision until compositing.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<f32>,
    pub mask: Vec<f32>,
}

impl Patch {
    pub fn new(width: usize, height: usize, pixels: Vec<f32>, mask: Vec<f32>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::input("patch dimensions must be positive"));
        }
        if pixels.len() != width * height * CHANNELS || mask.len() != width * height {
            return Err(Error::input("patch buffers do not match its dimensions"));
        }
        if !mask.iter().any(|&m| m > 0.0) {
            return Err(Error::input("patch mask has no positive entry"));
        }
        Ok(Self {
            width,
            height,
            pixels,
            mask,
        })
    }

    #[inline]
    pub fn mask_at(&self, y: usize, x: usize) -> f32 {
        self.mask[y * self.width + x]
    }

    #[inline]
    pub fn pixel_at(&self, y: usize, x: usize) -> [f32; 3] {
        let i = (y * self.width + x) * CHANNELS;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Number of mask entries above one half.
    pub fn mask_area(&self) -> usize {
        self.mask.iter().filter(|&&m| m > 0.5).count()
    }
}

/// Crop a patch from frame 0 of `clip` with side lengths drawn independently
/// from `size_min..=size_max`.
pub fn crop_patch(clip: &Clip, size_min: usize, size_max: usize, seed: u64) -> Result<Patch> {
    let (_, h, w) = clip.shape();
    if size_min == 0 || size_min > size_max {
        return Err(Error::config("patch size range must satisfy 1 <= min <= max"));
    }
    if size_max > h.min(w) {
        return Err(Error::config(alloc::format!(
            "patch size {size_max} exceeds frame {h}x{w}"
        )));
    }
    let mut rng = seed::rng(seed);
    let ph = rng.gen_range(size_min..=size_max);
    let pw = rng.gen_range(size_min..=size_max);
    let y0 = rng.gen_range(0..=h - ph);
    let x0 = rng.gen_range(0..=w - pw);

    let mut pixels = Vec::with_capacity(ph * pw * CHANNELS);
    for y in y0..y0 + ph {
        for x in x0..x0 + pw {
            pixels.extend(clip.pixel(0, y, x).iter().map(|&v| f32::from(v)));
        }
    }
    Patch::new(pw, ph, pixels, vec![1.0; pw * ph])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    Rectangle,
    Ellipse,
    Triangle,
    RoundedRectangle,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 4] = [
        ShapeKind::Rectangle,
        ShapeKind::Ellipse,
        ShapeKind::Triangle,
        ShapeKind::RoundedRectangle,
    ];

    /// Whether the point `(u, v)` in patch coordinates (pixel units, origin at
    /// the top-left corner) lies inside the shape inscribed in a `w × h` box.
    fn contains(self, u: f64, v: f64, w: f64, h: f64) -> bool {
        match self {
            ShapeKind::Rectangle => true,
            ShapeKind::Ellipse => {
                let dx = (u - w / 2.0) / (w / 2.0);
                let dy = (v - h / 2.0) / (h / 2.0);
                dx * dx + dy * dy <= 1.0
            }
            ShapeKind::Triangle => {
                // Apex at top-center, base along the bottom edge.
                let half = (w / 2.0) * (v / h);
                (u - w / 2.0).abs() <= half
            }
            ShapeKind::RoundedRectangle => {
                let r = 0.25 * w.min(h);
                let cx = u.clamp(r, w - r);
                let cy = v.clamp(r, h - r);
                let dx = u - cx;
                let dy = v - cy;
                dx * dx + dy * dy <= r * r
            }
        }
    }
}

/// Subsamples per pixel side used to estimate shape coverage.
const COVERAGE_SUBSAMPLES: usize = 4;

/// Replace the mask with the coverage of `shape` inscribed in the patch.
pub fn apply_shape(patch: &Patch, shape: ShapeKind) -> Patch {
    let (w, h) = (patch.width as f64, patch.height as f64);
    let n = COVERAGE_SUBSAMPLES;
    let inv = 1.0 / (n * n) as f32;
    let mut mask = Vec::with_capacity(patch.width * patch.height);
    for y in 0..patch.height {
        for x in 0..patch.width {
            let mut inside = 0usize;
            for sy in 0..n {
                for sx in 0..n {
                    let u = x as f64 + (sx as f64 + 0.5) / n as f64;
                    let v = y as f64 + (sy as f64 + 0.5) / n as f64;
                    if shape.contains(u, v, w, h) {
                        inside += 1;
                    }
                }
            }
            mask.push(inside as f32 * inv);
        }
    }
    if !mask.iter().any(|&m| m > 0.0) {
        // Only reachable for 1-pixel-wide triangles; keep the patch valid.
        mask = patch.mask.clone();
    }
    Patch {
        mask,
        ..patch.clone()
    }
}

/// A patch, its path, and the transformation tracks applied along it (in
/// composition order; empty means no transformation).
#[derive(Debug, Clone, PartialEq)]
pub struct TubeletSpec {
    pub patch: Patch,
    pub shape: ShapeKind,
    pub trajectory: Trajectory,
    pub tracks: Vec<TransformTrack>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFrame {
    pub patch: Patch,
    pub center: Point,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedTubelet {
    pub frames: Vec<RenderedFrame>,
}

impl RenderedTubelet {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Warp the patch for every frame and pin it to the trajectory. Frame 0
/// always carries the untransformed patch.
pub fn build_tubelet(spec: &TubeletSpec) -> Result<RenderedTubelet> {
    let frames = spec.trajectory.len();
    for track in &spec.tracks {
        if track.len() != frames {
            return Err(Error::input(alloc::format!(
                "transform track has {} entries, trajectory has {frames}",
                track.len()
            )));
        }
    }
    let mut out = Vec::with_capacity(frames);
    for (i, &center) in spec.trajectory.centers.iter().enumerate() {
        let patch = if i == 0 {
            spec.patch.clone()
        } else {
            let m = spec
                .tracks
                .iter()
                .fold(Affine::IDENTITY, |acc, t| t.params[i].matrix().after(acc));
            warp_affine(&spec.patch, &m).map_err(|e| Error::Frame {
                frame: i,
                source: Box::new(e),
            })?
        };
        out.push(RenderedFrame { patch, center });
    }
    Ok(RenderedTubelet { frames: out })
}
