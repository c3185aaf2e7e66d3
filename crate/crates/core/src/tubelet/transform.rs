//! Time-varying transformation tracks.

use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::math;
use crate::seed;
use crate::trajectory::sample_keyframes;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    None,
    Scale,
    Rotation,
    Shear,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [
        TransformKind::None,
        TransformKind::Scale,
        TransformKind::Rotation,
        TransformKind::Shear,
    ];

    pub fn identity(self) -> Theta {
        match self {
            TransformKind::None => Theta::Identity,
            TransformKind::Scale => Theta::Scale { w: 1.0, h: 1.0 },
            TransformKind::Rotation => Theta::Rotation { degrees: 0.0 },
            TransformKind::Shear => Theta::Shear { r: 0.0, s: 0.0 },
        }
    }

    /// Scale `[0.5, 1.5]`, rotation `[-90°, 90°]`, shear `[-1, 1]`.
    pub fn default_bounds(self) -> TransformBounds {
        match self {
            TransformKind::None => TransformBounds::new(0.0, 0.0),
            TransformKind::Scale => TransformBounds::new(0.5, 1.5),
            TransformKind::Rotation => TransformBounds::new(-90.0, 90.0),
            TransformKind::Shear => TransformBounds::new(-1.0, 1.0),
        }
    }

    fn from_components(self, c: [f64; 2]) -> Theta {
        match self {
            TransformKind::None => Theta::Identity,
            TransformKind::Scale => Theta::Scale { w: c[0], h: c[1] },
            TransformKind::Rotation => Theta::Rotation { degrees: c[0] },
            TransformKind::Shear => Theta::Shear { r: c[0], s: c[1] },
        }
    }

    fn components(self) -> usize {
        match self {
            TransformKind::None => 0,
            TransformKind::Rotation => 1,
            TransformKind::Scale | TransformKind::Shear => 2,
        }
    }
}

/// Per-scalar-component sampling range for keyframe parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformBounds {
    pub min: f64,
    pub max: f64,
}

impl TransformBounds {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }
}

/// Parameters of one frame's transformation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Theta {
    Identity,
    /// Horizontal and vertical scale factors.
    Scale { w: f64, h: f64 },
    /// In-plane rotation, degrees.
    Rotation { degrees: f64 },
    /// Off-diagonal shear terms of a unit-diagonal matrix.
    Shear { r: f64, s: f64 },
}

impl Theta {
    pub fn kind(&self) -> TransformKind {
        match self {
            Theta::Identity => TransformKind::None,
            Theta::Scale { .. } => TransformKind::Scale,
            Theta::Rotation { .. } => TransformKind::Rotation,
            Theta::Shear { .. } => TransformKind::Shear,
        }
    }

    pub fn components(&self) -> [f64; 2] {
        match *self {
            Theta::Identity => [0.0, 0.0],
            Theta::Scale { w, h } => [w, h],
            Theta::Rotation { degrees } => [degrees, 0.0],
            Theta::Shear { r, s } => [r, s],
        }
    }

    /// Linear part of the map, acting on `(x, y)` with `y` pointing down.
    pub fn matrix(&self) -> Affine {
        match *self {
            Theta::Identity => Affine::IDENTITY,
            Theta::Scale { w, h } => Affine([[w, 0.0], [0.0, h]]),
            Theta::Rotation { degrees } => {
                let a = degrees.to_radians();
                let (s, c) = (math::sin(a), math::cos(a));
                Affine([[c, -s], [s, c]])
            }
            Theta::Shear { r, s } => Affine([[1.0, r], [s, 1.0]]),
        }
    }
}

/// A 2×2 linear map, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine(pub [[f64; 2]; 2]);

impl Affine {
    pub const IDENTITY: Affine = Affine([[1.0, 0.0], [0.0, 1.0]]);

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn after(&self, inner: Affine) -> Affine {
        let (a, b) = (&self.0, &inner.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Affine(out)
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        let m = &self.0;
        (m[0][0] * x + m[0][1] * y, m[1][0] * x + m[1][1] * y)
    }

    pub fn inverse(&self) -> Option<Affine> {
        let d = self.det();
        if d == 0.0 {
            return None;
        }
        let m = &self.0;
        Some(Affine([
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ]))
    }
}

/// One `Theta` per frame. The first entry is always the identity of `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformTrack {
    pub kind: TransformKind,
    pub params: Vec<Theta>,
}

impl TransformTrack {
    pub fn identity(kind: TransformKind, frames: usize) -> Self {
        Self {
            kind,
            params: alloc::vec![kind.identity(); frames],
        }
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

/// Identity at frame 0, uniform draws inside `bounds` at the remaining
/// keyframes, componentwise linear interpolation in between.
pub fn sample_transform_track(
    kind: TransformKind,
    frames: usize,
    keyframes: usize,
    bounds: TransformBounds,
    seed: u64,
) -> Result<TransformTrack> {
    if kind == TransformKind::None {
        return Ok(TransformTrack::identity(kind, frames));
    }
    if !(bounds.min <= bounds.max) || !bounds.min.is_finite() || !bounds.max.is_finite() {
        return Err(Error::config("transform bounds must satisfy min <= max"));
    }
    let keys = sample_keyframes(frames, keyframes, seed::split(seed, "keyframes"))?;
    let mut rng = seed::rng(seed::split(seed, "params"));
    let n = kind.components();
    let mut anchors: Vec<[f64; 2]> = Vec::with_capacity(keys.len());
    anchors.push(kind.identity().components());
    for _ in 1..keys.len() {
        let mut c = [0.0; 2];
        for v in c.iter_mut().take(n) {
            *v = rng.gen_range(bounds.min..=bounds.max);
        }
        anchors.push(c);
    }
    let params = (0..frames)
        .map(|i| {
            let (a, b, t) = keys.bracket(i);
            let (ca, cb) = (anchors[a], anchors[b]);
            kind.from_components([ca[0] + t * (cb[0] - ca[0]), ca[1] + t * (cb[1] - ca[1])])
        })
        .collect();
    Ok(TransformTrack { kind, params })
}
