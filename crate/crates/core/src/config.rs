//! The full run configuration tree with defaults and validation.
//!
//! Pixel-valued settings (`tubelet.patch_size`, `motion.delta`) are given
//! at `tubelet.reference_size` and scaled by `min(H, W) / reference_size`
//! when applied to actual clips.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::compositor::{AugmentConfig, PairConfig, PairKind};
use crate::contrastive::{EncoderDims, TrainConfig};
use crate::math;
use crate::seed;
use crate::synth::{ClipKind, CorpusSpec};
use crate::trajectory::{MotionConfig, MotionKind};
use crate::tubelet::{ShapeKind, TransformBounds, TransformKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub tubelet: TubeletSection,
    pub motion: MotionSection,
    pub transform: TransformSection,
    pub augment: AugmentSection,
    pub train: TrainSection,
    pub corpus: CorpusSection,
    pub eval: EvalSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TubeletSection {
    /// Tubelets per pair (M).
    pub count: usize,
    /// Patch side range at `reference_size`.
    pub patch_size: (f64, f64),
    pub reference_size: f64,
    pub shapes: Vec<ShapeKind>,
}

impl Default for TubeletSection {
    fn default() -> Self {
        Self {
            count: 2,
            patch_size: (16.0, 64.0),
            reference_size: 112.0,
            shapes: ShapeKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MotionSection {
    pub kind: MotionKind,
    /// K.
    pub keyframes: usize,
    /// Keyframe displacement range at `tubelet.reference_size`.
    pub delta: (f64, f64),
    /// N.
    pub oversample: usize,
    pub sigma: f64,
}

impl Default for MotionSection {
    fn default() -> Self {
        Self {
            kind: MotionKind::Nonlinear,
            keyframes: 3,
            delta: (40.0, 80.0),
            oversample: 48,
            sigma: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformSection {
    /// Applied in order; empty for none.
    pub kinds: Vec<TransformKind>,
    pub keyframes: usize,
    pub scale: (f64, f64),
    /// Degrees.
    pub rotation: (f64, f64),
    pub shear: (f64, f64),
    /// Per-frame scale range of the scaled-crop control.
    pub control_scale: (f64, f64),
}

impl Default for TransformSection {
    fn default() -> Self {
        Self {
            kinds: vec![TransformKind::Rotation],
            keyframes: 3,
            scale: (0.5, 1.5),
            rotation: (-90.0, 90.0),
            shear: (-1.0, 1.0),
            control_scale: (0.5, 1.5),
        }
    }
}

impl TransformSection {
    fn bounds(&self, kind: TransformKind) -> TransformBounds {
        let (min, max) = match kind {
            TransformKind::None => (0.0, 0.0),
            TransformKind::Scale => self.scale,
            TransformKind::Rotation => self.rotation,
            TransformKind::Shear => self.shear,
        };
        TransformBounds { min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub crop_scale: (f64, f64),
    pub flip_probability: f64,
    pub jitter: (f64, f64),
}

impl Default for AugmentSection {
    fn default() -> Self {
        let a = AugmentConfig::default();
        Self {
            crop_scale: a.crop_scale,
            flip_probability: a.flip_probability,
            jitter: a.jitter,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub temperature: f64,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    pub key_momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub queue: usize,
    pub encoder: EncoderDims,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            temperature: t.temperature,
            lr: t.lr,
            momentum: t.momentum,
            weight_decay: t.weight_decay,
            key_momentum: t.key_momentum,
            batch_size: t.batch_size,
            epochs: t.epochs,
            queue: t.queue,
            encoder: t.dims,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub count: usize,
    pub frames: usize,
    pub height: usize,
    pub width: usize,
    pub kinds: BTreeMap<ClipKind, f64>,
}

impl Default for CorpusSection {
    fn default() -> Self {
        Self {
            count: 256,
            frames: 16,
            height: 32,
            width: 32,
            kinds: ClipKind::ALL.iter().map(|&k| (k, 1.0)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    /// Gallery size for retrieval.
    pub probes: usize,
    /// Background videos for probes, generated apart from the training corpus.
    pub corpus: usize,
    /// Pair mode of the probes.
    pub mode: Mode,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self {
            probes: 128,
            corpus: 128,
            mode: Mode::Tubelet,
        }
    }
}

/// Pair-generation variants, including the ablation matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Motion and transforms exactly as configured.
    Tubelet,
    Static,
    Linear,
    Nonlinear,
    #[serde(alias = "nonlinear+rotation")]
    NonlinearRotation,
    ScaledCropControl,
}

impl Mode {
    pub const ABLATION: [Mode; 5] = [
        Mode::Static,
        Mode::Linear,
        Mode::Nonlinear,
        Mode::NonlinearRotation,
        Mode::ScaledCropControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Tubelet => "tubelet",
            Mode::Static => "static",
            Mode::Linear => "linear",
            Mode::Nonlinear => "nonlinear",
            Mode::NonlinearRotation => "nonlinear+rotation",
            Mode::ScaledCropControl => "scaled-crop-control",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "tubelet" => Ok(Mode::Tubelet),
            "static" => Ok(Mode::Static),
            "linear" => Ok(Mode::Linear),
            "nonlinear" => Ok(Mode::Nonlinear),
            "nonlinear+rotation" | "nonlinear-rotation" => Ok(Mode::NonlinearRotation),
            "scaled-crop-control" => Ok(Mode::ScaledCropControl),
            other => Err(Error::config(alloc::format!("unknown mode `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn range(key: &str, (lo, hi): (f64, f64), positive: bool) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::constraint(key, "need finite min <= max"));
    }
    if positive && lo <= 0.0 {
        return Err(Error::constraint(key, "must be positive"));
    }
    Ok(())
}

fn positive(key: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(Error::constraint(key, "must be positive"));
    }
    Ok(())
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tubelet;
        range("tubelet.patch_size", t.patch_size, true)?;
        if !(t.reference_size > 0.0) {
            return Err(Error::constraint("tubelet.reference_size", "must be positive"));
        }
        if t.shapes.is_empty() {
            return Err(Error::constraint("tubelet.shapes", "must not be empty"));
        }
        let m = &self.motion;
        if m.keyframes < 2 {
            return Err(Error::constraint("motion.keyframes", "must be at least 2"));
        }
        range("motion.delta", m.delta, true)?;
        if !(m.sigma > 0.0) {
            return Err(Error::constraint("motion.sigma", "must be positive"));
        }
        if m.oversample <= self.corpus.frames {
            return Err(Error::constraint("motion.oversample", "must exceed corpus.frames"));
        }
        let x = &self.transform;
        if x.keyframes < 2 {
            return Err(Error::constraint("transform.keyframes", "must be at least 2"));
        }
        range("transform.scale", x.scale, true)?;
        range("transform.rotation", x.rotation, false)?;
        range("transform.shear", x.shear, false)?;
        range("transform.control_scale", x.control_scale, true)?;
        let a = &self.augment;
        range("augment.crop_scale", a.crop_scale, true)?;
        if a.crop_scale.1 > 1.0 {
            return Err(Error::constraint("augment.crop_scale", "must not exceed 1"));
        }
        if !(0.0..=1.0).contains(&a.flip_probability) {
            return Err(Error::constraint("augment.flip_probability", "must lie in [0, 1]"));
        }
        range("augment.jitter", a.jitter, true)?;
        self.train_config().validate()?;
        let c = &self.corpus;
        if c.count < 2 {
            return Err(Error::constraint("corpus.count", "must be at least 2"));
        }
        positive("corpus.frames", c.frames)?;
        positive("corpus.height", c.height)?;
        positive("corpus.width", c.width)?;
        if c.kinds.is_empty() || c.kinds.values().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::constraint("corpus.kinds", "weights must be positive"));
        }
        let d = &self.train.encoder;
        if c.frames % d.frames != 0 || c.height % d.grid != 0 || c.width % d.grid != 0 {
            return Err(Error::constraint(
                "train.encoder",
                "pooling grid must divide the corpus clip shape",
            ));
        }
        if self.eval.probes < 2 {
            return Err(Error::constraint("eval.probes", "must be at least 2"));
        }
        if self.eval.corpus < 2 {
            return Err(Error::constraint("eval.corpus", "must be at least 2"));
        }
        Ok(())
    }

    fn pixel_scale(&self) -> f64 {
        self.corpus.height.min(self.corpus.width) as f64 / self.tubelet.reference_size
    }

    /// Patch side range in pixels at the corpus resolution.
    pub fn patch_size(&self) -> (usize, usize) {
        let s = self.pixel_scale();
        let (lo, hi) = self.tubelet.patch_size;
        let lo = (math::round(lo * s) as usize).max(1);
        (lo, (math::round(hi * s) as usize).max(lo))
    }

    pub fn pair_config(&self, mode: Mode) -> PairConfig {
        let c = &self.corpus;
        let s = self.pixel_scale();
        let (kind, transforms) = match mode {
            Mode::Tubelet => (self.motion.kind, self.transform.kinds.clone()),
            Mode::Static => (MotionKind::Static, vec![]),
            Mode::Linear => (MotionKind::Linear, vec![]),
            Mode::Nonlinear | Mode::ScaledCropControl => (MotionKind::Nonlinear, vec![]),
            Mode::NonlinearRotation => (MotionKind::Nonlinear, vec![TransformKind::Rotation]),
        };
        let mut motion = MotionConfig::new(kind, c.frames, c.height as f64, c.width as f64);
        motion.keyframes = self.motion.keyframes;
        motion.delta_min = self.motion.delta.0 * s;
        motion.delta_max = self.motion.delta.1 * s;
        motion.oversample = self.motion.oversample;
        motion.sigma = self.motion.sigma;
        let (lo, hi) = self.transform.control_scale;
        PairConfig {
            kind: if mode == Mode::ScaledCropControl {
                PairKind::ScaledCropControl
            } else {
                PairKind::Tubelet
            },
            tubelets: self.tubelet.count,
            patch_size: self.patch_size(),
            shapes: self.tubelet.shapes.clone(),
            motion,
            transforms: transforms
                .into_iter()
                .map(|k| (k, self.transform.bounds(k)))
                .collect(),
            transform_keyframes: self.transform.keyframes,
            augment: AugmentConfig {
                crop_scale: self.augment.crop_scale,
                output_size: None,
                flip_probability: self.augment.flip_probability,
                jitter: self.augment.jitter,
            },
            control_scale: TransformBounds { min: lo, max: hi },
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            temperature: t.temperature,
            lr: t.lr,
            momentum: t.momentum,
            weight_decay: t.weight_decay,
            key_momentum: t.key_momentum,
            batch_size: t.batch_size,
            epochs: t.epochs,
            queue: t.queue,
            seed: seed::split(self.seed, "train"),
            dims: t.encoder,
        }
    }

    fn corpus_with(&self, count: usize, label: &str) -> CorpusSpec {
        let c = &self.corpus;
        CorpusSpec {
            count,
            shape: (c.frames, c.height, c.width),
            kinds: c.kinds.iter().map(|(&k, &w)| (k, w)).collect(),
            seed: seed::split(self.seed, label),
        }
    }

    /// Training backgrounds.
    pub fn corpus_spec(&self) -> CorpusSpec {
        self.corpus_with(self.corpus.count, "corpus")
    }

    /// Held-out backgrounds for retrieval probes.
    pub fn probe_corpus_spec(&self) -> CorpusSpec {
        self.corpus_with(self.eval.corpus, "probe-corpus")
    }

    /// Human-readable summary of the scaled pixel settings.
    pub fn describe_scaling(&self) -> String {
        let (lo, hi) = self.patch_size();
        let s = self.pixel_scale();
        alloc::format!(
            "patch {lo}..={hi} px, keyframe displacement {:.2}..={:.2} px",
            self.motion.delta.0 * s,
            self.motion.delta.1 * s
        )
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tubelet: TubeletSection::default(),
            motion: MotionSection::default(),
            transform: TransformSection::default(),
            augment: AugmentSection::default(),
            train: TrainSection::default(),
            corpus: CorpusSection::default(),
            eval: EvalSection::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_scale() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(c.patch_size(), (5, 18));
        let p = c.pair_config(Mode::Tubelet);
        assert!((p.motion.delta_min - 40.0 * 32.0 / 112.0).abs() < 1e-12);
        assert!((p.motion.delta_max - 80.0 * 32.0 / 112.0).abs() < 1e-12);
        assert_eq!(p.tubelets, 2);
        assert_eq!(p.transforms.len(), 1);
    }

    #[test]
    fn ablation_modes_differ_in_one_factor() {
        let c = RunConfig::default();
        let lin = c.pair_config(Mode::Linear);
        let non = c.pair_config(Mode::Nonlinear);
        let rot = c.pair_config(Mode::NonlinearRotation);
        assert_eq!(lin.motion.kind, MotionKind::Linear);
        assert_eq!(non.motion.kind, MotionKind::Nonlinear);
        assert!(non.transforms.is_empty());
        assert_eq!(rot.transforms[0].0, TransformKind::Rotation);
        assert_eq!(c.pair_config(Mode::ScaledCropControl).kind, PairKind::ScaledCropControl);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in Mode::ABLATION.into_iter().chain([Mode::Tubelet]) {
            assert_eq!(Mode::from_name(m.name()).unwrap(), m);
        }
        assert!(Mode::from_name("wobbly").is_err());
    }

    #[test]
    fn constraint_keys() {
        let mut c = RunConfig::default();
        c.train.temperature = -1.0;
        assert!(matches!(c.validate(), Err(Error::Constraint { key, .. }) if key == "train.temperature"));
        let mut c = RunConfig::default();
        c.corpus.count = 1;
        assert!(matches!(c.validate(), Err(Error::Constraint { key, .. }) if key == "corpus.count"));
        let mut c = RunConfig::default();
        c.train.encoder.grid = 5;
        assert!(matches!(c.validate(), Err(Error::Constraint { key, .. }) if key == "train.encoder"));
    }
}
