//! Clip augmentation, tubelet overlay, and positive pair construction.
//!
//! Pair seeds fan out through [`crate::seed::split`] with these stream
//! labels: `augment-a`, `augment-b`, and per tubelet index `crop`, `shape`,
//! `trajectory`, `transform/<kind>`, plus `control` for the scaled-crop
//! control's per-frame draws.

use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::clip::{Clip, CoverageGrid, CHANNELS};
use crate::math;
use crate::seed;
use crate::trajectory::{self, MotionConfig, Point, Trajectory};
use crate::tubelet::{
    apply_shape, build_tubelet, crop_patch, sample_transform_track, warp, Patch, RenderedFrame,
    RenderedTubelet, ShapeKind, Theta, TransformBounds, TransformKind, TransformTrack, TubeletSpec,
};
use crate::{Error, Result};

/// Largest `f32` below one; partial coverage never rounds up to full.
const PARTIAL_COVERAGE_MAX: f32 = 1.0 - f32::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Crop area as a fraction of the source frame.
    pub crop_scale: (f64, f64),
    /// `(height, width)`; `None` keeps the source size.
    pub output_size: Option<(usize, usize)>,
    pub flip_probability: f64,
    /// Per-channel multiplicative factor range.
    pub jitter: (f64, f64),
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            crop_scale: (0.5, 1.0),
            output_size: None,
            flip_probability: 0.5,
            jitter: (0.6, 1.4),
        }
    }
}

impl AugmentConfig {
    /// No crop, no flip, no jitter.
    pub fn identity() -> Self {
        Self {
            crop_scale: (1.0, 1.0),
            output_size: None,
            flip_probability: 0.0,
            jitter: (1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.crop_scale;
        if !(lo > 0.0 && lo <= hi && hi <= 1.0) {
            return Err(Error::config("crop scale range must satisfy 0 < min <= max <= 1"));
        }
        if !(0.0..=1.0).contains(&self.flip_probability) {
            return Err(Error::config("flip probability must lie in [0, 1]"));
        }
        let (jl, jh) = self.jitter;
        if !(jl > 0.0 && jl <= jh) {
            return Err(Error::config("jitter range must satisfy 0 < min <= max"));
        }
        if let Some((h, w)) = self.output_size {
            if h == 0 || w == 0 {
                return Err(Error::config("output size must be positive"));
            }
        }
        Ok(())
    }
}

/// One concrete draw of [`AugmentConfig`], shared by all frames of a clip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentParams {
    pub crop_x: usize,
    pub crop_y: usize,
    pub crop_w: usize,
    pub crop_h: usize,
    pub out_h: usize,
    pub out_w: usize,
    pub flip: bool,
    pub jitter: [f64; 3],
}

impl AugmentParams {
    pub fn sample(clip: &Clip, cfg: &AugmentConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let (_, h, w) = clip.shape();
        let (out_h, out_w) = cfg.output_size.unwrap_or((h, w));
        if out_h > h || out_w > w {
            return Err(Error::config(alloc::format!(
                "output {out_h}x{out_w} larger than source {h}x{w}"
            )));
        }
        let mut rng = seed::rng(seed);
        let scale = if cfg.crop_scale.0 == cfg.crop_scale.1 {
            cfg.crop_scale.0
        } else {
            rng.gen_range(cfg.crop_scale.0..=cfg.crop_scale.1)
        };
        let side = math::sqrt(scale);
        let crop_h = (math::round(h as f64 * side) as usize).clamp(1, h);
        let crop_w = (math::round(w as f64 * side) as usize).clamp(1, w);
        let crop_y = rng.gen_range(0..=h - crop_h);
        let crop_x = rng.gen_range(0..=w - crop_w);
        let flip = rng.gen_bool(cfg.flip_probability);
        let mut jitter = [1.0; 3];
        for j in jitter.iter_mut() {
            *j = if cfg.jitter.0 == cfg.jitter.1 {
                cfg.jitter.0
            } else {
                rng.gen_range(cfg.jitter.0..=cfg.jitter.1)
            };
        }
        Ok(Self {
            crop_x,
            crop_y,
            crop_w,
            crop_h,
            out_h,
            out_w,
            flip,
            jitter,
        })
    }

    /// Crop, resize (bilinear, pixel-center aligned), flip, and jitter.
    pub fn apply(&self, clip: &Clip) -> Result<Clip> {
        let (frames, h, w) = clip.shape();
        if self.crop_x + self.crop_w > w || self.crop_y + self.crop_h > h {
            return Err(Error::input("crop window exceeds clip"));
        }
        let mut out = Clip::zeros(frames, self.out_h, self.out_w)?;
        out.frame_rate = clip.frame_rate;
        let sy = self.crop_h as f64 / self.out_h as f64;
        let sx = self.crop_w as f64 / self.out_w as f64;
        // Precompute sampling taps per output row and column.
        let taps = |n_out: usize, scale: f64, origin: usize, len: usize| -> Vec<(usize, usize, f64)> {
            (0..n_out)
                .map(|o| {
                    let s = ((o as f64 + 0.5) * scale - 0.5).clamp(0.0, (len - 1) as f64);
                    let i0 = math::floor(s) as usize;
                    let i1 = (i0 + 1).min(len - 1);
                    (origin + i0, origin + i1, s - i0 as f64)
                })
                .collect()
        };
        let rows = taps(self.out_h, sy, self.crop_y, self.crop_h);
        let cols = taps(self.out_w, sx, self.crop_x, self.crop_w);

        for t in 0..frames {
            for (oy, &(y0, y1, fy)) in rows.iter().enumerate() {
                for ox in 0..self.out_w {
                    let src_col = if self.flip { self.out_w - 1 - ox } else { ox };
                    let (x0, x1, fx) = cols[src_col];
                    let p00 = clip.pixel(t, y0, x0);
                    let p01 = clip.pixel(t, y0, x1);
                    let p10 = clip.pixel(t, y1, x0);
                    let p11 = clip.pixel(t, y1, x1);
                    let mut rgb = [0u8; 3];
                    for c in 0..CHANNELS {
                        let top = f64::from(p00[c]) * (1.0 - fx) + f64::from(p01[c]) * fx;
                        let bot = f64::from(p10[c]) * (1.0 - fx) + f64::from(p11[c]) * fx;
                        let v = (top * (1.0 - fy) + bot * fy) * self.jitter[c];
                        rgb[c] = math::to_u8(v as f32);
                    }
                    out.set_pixel(t, oy, ox, rgb);
                }
            }
        }
        Ok(out)
    }
}

/// Crop, resize, flip and color-jitter a clip with one draw shared by every
/// frame.
pub fn spatial_augment(clip: &Clip, cfg: &AugmentConfig, seed: u64) -> Result<Clip> {
    AugmentParams::sample(clip, cfg, seed)?.apply(clip)
}

/// Top-left corner of a `w × h` tile centered at `center`.
#[inline]
pub fn tile_origin(center: Point, w: usize, h: usize) -> (i64, i64) {
    (
        math::floor(center.x - w as f64 / 2.0 + 0.5) as i64,
        math::floor(center.y - h as f64 / 2.0 + 0.5) as i64,
    )
}

/// Alpha-composite every frame of `tubelet` into `clip` in place and
/// accumulate its coverage into `union`.
pub fn overlay_into(clip: &mut Clip, union: &mut CoverageGrid, tubelet: &RenderedTubelet) -> Result<()> {
    let (frames, h, w) = clip.shape();
    if tubelet.len() != frames {
        return Err(Error::input(alloc::format!(
            "tubelet has {} frames, clip has {frames}",
            tubelet.len()
        )));
    }
    if union.shape() != clip.shape() {
        return Err(Error::input("coverage grid does not match clip"));
    }
    for (t, frame) in tubelet.frames.iter().enumerate() {
        let RenderedFrame { patch, center } = frame;
        let (ox, oy) = tile_origin(*center, patch.width, patch.height);
        for py in 0..patch.height {
            let y = oy + py as i64;
            if y < 0 || y >= h as i64 {
                continue;
            }
            for px in 0..patch.width {
                let x = ox + px as i64;
                if x < 0 || x >= w as i64 {
                    continue;
                }
                let m = patch.mask_at(py, px);
                if m <= 0.0 {
                    continue;
                }
                let (x, y) = (x as usize, y as usize);
                let fg = patch.pixel_at(py, px);
                let bg = clip.pixel(t, y, x);
                let mut rgb = [0u8; 3];
                for c in 0..CHANNELS {
                    rgb[c] = math::to_u8(m * fg[c] + (1.0 - m) * f32::from(bg[c]));
                }
                clip.set_pixel(t, y, x, rgb);
                accumulate(union, t, y, x, m);
            }
        }
    }
    Ok(())
}

fn accumulate(union: &mut CoverageGrid, t: usize, y: usize, x: usize, m: f32) {
    let u = union.get(t, y, x);
    let v = if m >= 1.0 || u >= 1.0 {
        1.0
    } else {
        // Two partial layers never count as full coverage.
        (1.0 - (1.0 - u) * (1.0 - m)).min(PARTIAL_COVERAGE_MAX)
    };
    union.set(t, y, x, v);
}

/// Composite one tubelet onto a copy of `clip`.
pub fn overlay(clip: &Clip, tubelet: &RenderedTubelet) -> Result<(Clip, CoverageGrid)> {
    let (f, h, w) = clip.shape();
    let mut out = clip.clone();
    let mut union = CoverageGrid::empty(f, h, w);
    overlay_into(&mut out, &mut union, tubelet)?;
    Ok((out, union))
}

/// Which pair generator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// Smooth trajectories with interpolated transform tracks.
    Tubelet,
    /// Per-frame independent position and scale.
    ScaledCropControl,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub kind: PairKind,
    /// Tubelets per pair.
    pub tubelets: usize,
    /// Patch side range in pixels, inclusive.
    pub patch_size: (usize, usize),
    pub shapes: Vec<ShapeKind>,
    /// Frame count and dimensions are taken from the clips at build time.
    pub motion: MotionConfig,
    /// Composed in order; empty means untransformed.
    pub transforms: Vec<(TransformKind, TransformBounds)>,
    pub transform_keyframes: usize,
    pub augment: AugmentConfig,
    /// Per-frame scale range for the scaled-crop control.
    pub control_scale: TransformBounds,
}

impl PairConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shapes.is_empty() {
            return Err(Error::config("at least one patch shape is required"));
        }
        if self.patch_size.0 == 0 || self.patch_size.0 > self.patch_size.1 {
            return Err(Error::config("patch size range must satisfy 1 <= min <= max"));
        }
        if !(self.control_scale.min > 0.0 && self.control_scale.min <= self.control_scale.max) {
            return Err(Error::config("control scale range must be positive and ordered"));
        }
        self.augment.validate()
    }
}

/// Two composited clips sharing identical tubelets.
#[derive(Debug, Clone, PartialEq)]
pub struct PairSample {
    pub clip_a: Clip,
    pub clip_b: Clip,
    pub specs: Vec<TubeletSpec>,
    pub union_a: CoverageGrid,
    pub union_b: CoverageGrid,
    pub seed: u64,
}

/// The augmented backgrounds a pair is composited onto.
pub fn augment_sources(v1: &Clip, v2: &Clip, cfg: &PairConfig, seed: u64) -> Result<(Clip, Clip)> {
    if v1.shape() != v2.shape() {
        return Err(Error::input("pair source clips differ in shape"));
    }
    let a = spatial_augment(v1, &cfg.augment, seed::split(seed, "augment-a"))?;
    let b = spatial_augment(v2, &cfg.augment, seed::split(seed, "augment-b"))?;
    Ok((a, b))
}

fn shaped_patch(source: &Clip, cfg: &PairConfig, seed: u64, i: u64) -> Result<(Patch, ShapeKind)> {
    let patch = crop_patch(
        source,
        cfg.patch_size.0,
        cfg.patch_size.1,
        seed::split_index(seed, "crop", i),
    )?;
    let mut rng = seed::rng(seed::split_index(seed, "shape", i));
    let shape = cfg.shapes[rng.gen_range(0..cfg.shapes.len())];
    Ok((apply_shape(&patch, shape), shape))
}

/// Sample the `i`-th tubelet of a pair built on `source`.
pub fn sample_tubelet_spec(source: &Clip, cfg: &PairConfig, seed: u64, i: u64) -> Result<TubeletSpec> {
    let (frames, h, w) = source.shape();
    let (patch, shape) = shaped_patch(source, cfg, seed, i)?;
    let motion = MotionConfig {
        frames,
        width: w as f64,
        height: h as f64,
        ..cfg.motion.clone()
    };
    let trajectory = trajectory::generate(&motion, seed::split_index(seed, "trajectory", i))?;
    let tracks = cfg
        .transforms
        .iter()
        .filter(|(kind, _)| *kind != TransformKind::None)
        .map(|&(kind, bounds)| {
            let label = alloc::format!("transform/{kind:?}");
            sample_transform_track(
                kind,
                frames,
                cfg.transform_keyframes,
                bounds,
                seed::split_index(seed, &label, i),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TubeletSpec {
        patch,
        shape,
        trajectory,
        tracks,
    })
}

fn composite(a: Clip, b: Clip, specs: Vec<TubeletSpec>, tubelets: &[RenderedTubelet], seed: u64) -> Result<PairSample> {
    let (f, h, w) = a.shape();
    let mut clip_a = a;
    let mut clip_b = b;
    let mut union_a = CoverageGrid::empty(f, h, w);
    let mut union_b = CoverageGrid::empty(f, h, w);
    for r in tubelets {
        overlay_into(&mut clip_a, &mut union_a, r)?;
        overlay_into(&mut clip_b, &mut union_b, r)?;
    }
    Ok(PairSample {
        clip_a,
        clip_b,
        specs,
        union_a,
        union_b,
        seed,
    })
}

/// Build a tubelet-contrastive positive pair from two source clips.
pub fn make_pair(v1: &Clip, v2: &Clip, cfg: &PairConfig, seed: u64) -> Result<PairSample> {
    if cfg.kind == PairKind::ScaledCropControl {
        return make_scaled_crop_control(v1, v2, cfg, seed);
    }
    cfg.validate()?;
    let (a, b) = augment_sources(v1, v2, cfg, seed)?;
    let mut specs = Vec::with_capacity(cfg.tubelets);
    let mut rendered = Vec::with_capacity(cfg.tubelets);
    for i in 0..cfg.tubelets as u64 {
        let spec = sample_tubelet_spec(&a, cfg, seed, i)?;
        rendered.push(build_tubelet(&spec)?);
        specs.push(spec);
    }
    composite(a, b, specs, &rendered, seed)
}

/// Same pipeline as [`make_pair`], except every frame places the patch at an
/// independent uniform position with an independent scale: no trajectory
/// continuity and no interpolated transform track.
pub fn make_scaled_crop_control(v1: &Clip, v2: &Clip, cfg: &PairConfig, seed: u64) -> Result<PairSample> {
    cfg.validate()?;
    let (a, b) = augment_sources(v1, v2, cfg, seed)?;
    let (frames, h, w) = a.shape();
    let mut specs = Vec::with_capacity(cfg.tubelets);
    let mut rendered = Vec::with_capacity(cfg.tubelets);
    for i in 0..cfg.tubelets as u64 {
        let (patch, shape) = shaped_patch(&a, cfg, seed, i)?;
        let mut rng = seed::rng(seed::split_index(seed, "control", i));
        let mut centers = Vec::with_capacity(frames);
        let mut params = Vec::with_capacity(frames);
        let mut out = Vec::with_capacity(frames);
        let s = cfg.control_scale;
        for _ in 0..frames {
            let center = Point::new(rng.gen_range(0.0..=w as f64), rng.gen_range(0.0..=h as f64));
            let theta = Theta::Scale {
                w: rng.gen_range(s.min..=s.max),
                h: rng.gen_range(s.min..=s.max),
            };
            out.push(RenderedFrame {
                patch: warp(&patch, &theta)?,
                center,
            });
            centers.push(center);
            params.push(theta);
        }
        rendered.push(RenderedTubelet { frames: out });
        specs.push(TubeletSpec {
            patch,
            shape,
            trajectory: Trajectory { centers },
            tracks: alloc::vec![TransformTrack {
                kind: TransformKind::Scale,
                params,
            }],
        });
    }
    composite(a, b, specs, &rendered, seed)
}

/// Ways a pair can break the shared-tubelet property.
#[derive(Debug, Clone, PartialEq)]
pub enum SharedViolation {
    CoverageMismatch,
    Pixel { frame: usize, y: usize, x: usize },
}

/// Check that the two clips agree exactly wherever the union coverage is 1.
pub fn check_shared_tubelet(pair: &PairSample) -> core::result::Result<(), SharedViolation> {
    if pair.union_a != pair.union_b || pair.clip_a.shape() != pair.clip_b.shape() {
        return Err(SharedViolation::CoverageMismatch);
    }
    let (f, h, w) = pair.clip_a.shape();
    for t in 0..f {
        for y in 0..h {
            for x in 0..w {
                if pair.union_a.get(t, y, x) == 1.0
                    && pair.clip_a.pixel(t, y, x) != pair.clip_b.pixel(t, y, x)
                {
                    return Err(SharedViolation::Pixel { frame: t, y, x });
                }
            }
        }
    }
    Ok(())
}

/// Check that wherever coverage is zero each clip equals its background.
pub fn check_untouched_background(pair: &PairSample, base_a: &Clip, base_b: &Clip) -> bool {
    let (f, h, w) = pair.clip_a.shape();
    if base_a.shape() != (f, h, w) || base_b.shape() != (f, h, w) {
        return false;
    }
    for t in 0..f {
        for y in 0..h {
            for x in 0..w {
                if pair.union_a.get(t, y, x) == 0.0
                    && (pair.clip_a.pixel(t, y, x) != base_a.pixel(t, y, x)
                        || pair.clip_b.pixel(t, y, x) != base_b.pixel(t, y, x))
                {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::MotionKind;
    use alloc::vec;

    fn noise_clip(seed: u64, f: usize, h: usize, w: usize) -> Clip {
        let mut rng = seed::rng(seed);
        let data = (0..f * h * w * 3).map(|_| rng.gen::<u8>()).collect();
        Clip::from_data(f, h, w, data).unwrap()
    }

    fn pair_cfg(kind: MotionKind) -> PairConfig {
        PairConfig {
            kind: PairKind::Tubelet,
            tubelets: 2,
            patch_size: (5, 18),
            shapes: ShapeKind::ALL.to_vec(),
            motion: MotionConfig::new(kind, 16, 32.0, 32.0),
            transforms: vec![(TransformKind::Rotation, TransformKind::Rotation.default_bounds())],
            transform_keyframes: 3,
            augment: AugmentConfig::default(),
            control_scale: TransformBounds::new(0.5, 1.5),
        }
    }

    #[test]
    fn identity_augment() {
        let c = noise_clip(1, 4, 10, 12);
        assert_eq!(spatial_augment(&c, &AugmentConfig::identity(), 9).unwrap(), c);
    }

    #[test]
    fn flip_is_involution() {
        let c = noise_clip(2, 3, 8, 9);
        let cfg = AugmentConfig {
            flip_probability: 1.0,
            ..AugmentConfig::identity()
        };
        let once = spatial_augment(&c, &cfg, 1).unwrap();
        assert_ne!(once, c);
        assert_eq!(once.pixel(0, 3, 0), c.pixel(0, 3, 8));
        assert_eq!(spatial_augment(&once, &cfg, 2).unwrap(), c);
    }

    #[test]
    fn jitter_scales_channel_means() {
        let c = Clip::filled(2, 16, 16, 128).unwrap();
        let params = AugmentParams {
            crop_x: 0,
            crop_y: 0,
            crop_w: 16,
            crop_h: 16,
            out_h: 16,
            out_w: 16,
            flip: false,
            jitter: [1.1, 0.9, 1.0],
        };
        let out = params.apply(&c).unwrap();
        let n = (out.data().len() / 3) as f64;
        for (ch, factor) in [1.1, 0.9, 1.0].iter().enumerate() {
            let mean: f64 = out.data().iter().skip(ch).step_by(3).map(|&v| f64::from(v)).sum::<f64>() / n;
            assert!((mean - 128.0 * factor).abs() <= 1.0, "{ch}: {mean}");
        }
    }

    #[test]
    fn oversized_output_rejected() {
        let c = noise_clip(3, 2, 8, 8);
        let cfg = AugmentConfig {
            output_size: Some((16, 16)),
            ..AugmentConfig::default()
        };
        assert!(matches!(spatial_augment(&c, &cfg, 0), Err(Error::InvalidConfig(_))));
    }

    fn rect_tubelet(frames: usize, size: usize, center: Point, value: f32, mask: f32) -> RenderedTubelet {
        let patch = Patch {
            width: size,
            height: size,
            pixels: vec![value; size * size * 3],
            mask: vec![mask; size * size],
        };
        RenderedTubelet {
            frames: (0..frames)
                .map(|_| RenderedFrame {
                    patch: patch.clone(),
                    center,
                })
                .collect(),
        }
    }

    #[test]
    fn zero_mask_overlay_is_noop() {
        let c = noise_clip(4, 3, 16, 16);
        let (out, union) = overlay(&c, &rect_tubelet(3, 4, Point::new(8.0, 8.0), 255.0, 0.0)).unwrap();
        assert_eq!(out, c);
        assert!(union.is_empty());
    }

    #[test]
    fn binary_rectangle_overlay() {
        let c = noise_clip(5, 2, 16, 16);
        let (out, union) = overlay(&c, &rect_tubelet(2, 4, Point::new(8.0, 8.0), 7.0, 1.0)).unwrap();
        for y in 0..16 {
            for x in 0..16 {
                let inside = (6..10).contains(&y) && (6..10).contains(&x);
                if inside {
                    assert_eq!(out.pixel(1, y, x), [7, 7, 7]);
                    assert_eq!(union.get(1, y, x), 1.0);
                } else {
                    assert_eq!(out.pixel(1, y, x), c.pixel(1, y, x));
                    assert_eq!(union.get(1, y, x), 0.0);
                }
            }
        }
    }

    #[test]
    fn corner_overlay_clips_to_frame() {
        let c = noise_clip(6, 1, 20, 20);
        let (out, union) = overlay(&c, &rect_tubelet(1, 16, Point::new(0.0, 0.0), 3.0, 1.0)).unwrap();
        // Patch rect [-8, 8) x [-8, 8) intersected with frame [0, 20) x [0, 20).
        let (x_lo, x_hi) = ((-8i64).max(0), 8i64.min(20));
        for y in 0..20i64 {
            for x in 0..20i64 {
                let inside = y >= x_lo && y < x_hi && x >= x_lo && x < x_hi;
                assert_eq!(union.get(0, y as usize, x as usize) == 1.0, inside);
                if !inside {
                    assert_eq!(out.pixel(0, y as usize, x as usize), c.pixel(0, y as usize, x as usize));
                }
            }
        }
        assert_eq!(union.covered_count(), 64);
    }

    #[test]
    fn overlay_length_mismatch() {
        let c = noise_clip(7, 3, 8, 8);
        assert!(overlay(&c, &rect_tubelet(2, 2, Point::new(1.0, 1.0), 0.0, 1.0)).is_err());
    }

    #[test]
    fn partial_layers_never_reach_full_coverage() {
        let mut g = CoverageGrid::empty(1, 1, 1);
        accumulate(&mut g, 0, 0, 0, 0.999_999_9);
        accumulate(&mut g, 0, 0, 0, 0.999_999_9);
        assert!(g.get(0, 0, 0) < 1.0);
        accumulate(&mut g, 0, 0, 0, 1.0);
        assert_eq!(g.get(0, 0, 0), 1.0);
    }

    #[test]
    fn zero_tubelets_returns_augmented_sources() {
        let (v1, v2) = (noise_clip(8, 16, 32, 32), noise_clip(9, 16, 32, 32));
        let mut cfg = pair_cfg(MotionKind::Nonlinear);
        cfg.tubelets = 0;
        let pair = make_pair(&v1, &v2, &cfg, 3).unwrap();
        let (a, b) = augment_sources(&v1, &v2, &cfg, 3).unwrap();
        assert_eq!((pair.clip_a.clone(), pair.clip_b.clone()), (a, b));
        assert!(pair.union_a.is_empty() && pair.union_b.is_empty());
        cfg.kind = PairKind::ScaledCropControl;
        let control = make_pair(&v1, &v2, &cfg, 3).unwrap();
        assert_eq!(control, pair);
    }

    #[test]
    fn shared_tubelet_and_background() {
        let (v1, v2) = (noise_clip(10, 16, 32, 32), noise_clip(11, 16, 32, 32));
        for kind in [MotionKind::Static, MotionKind::Linear, MotionKind::Nonlinear] {
            let cfg = pair_cfg(kind);
            for seed in 0..5 {
                let pair = make_pair(&v1, &v2, &cfg, seed).unwrap();
                assert_eq!(check_shared_tubelet(&pair), Ok(()));
                let (a, b) = augment_sources(&v1, &v2, &cfg, seed).unwrap();
                assert!(check_untouched_background(&pair, &a, &b));
                assert!(pair.union_a.covered_count() > 0);
                assert_eq!(pair, make_pair(&v1, &v2, &cfg, seed).unwrap());
            }
        }
    }
}
