//! A small MLP encoder over pooled raw and temporal-difference channels.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{dot, norm, Embedding};
use crate::clip::{Clip, CHANNELS};
use crate::math;
use crate::seed;
use crate::{Error, Result};

/// Multiplier on temporal-difference channels, which are otherwise much
/// smaller in magnitude than the raw intensities.
pub const DIFF_GAIN: f64 = 4.0;

/// Raw RGB plus per-channel temporal difference.
const FEATURE_CHANNELS: usize = 2 * CHANNELS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderDims {
    /// Pooled temporal length; the clip length must be a multiple.
    pub frames: usize,
    /// Pooled spatial grid side; clip height and width must be multiples.
    pub grid: usize,
    pub hidden: usize,
    pub proj_hidden: usize,
    pub embed: usize,
}

impl Default for EncoderDims {
    fn default() -> Self {
        Self {
            frames: 8,
            grid: 8,
            hidden: 256,
            proj_hidden: 256,
            embed: 128,
        }
    }
}

impl EncoderDims {
    pub fn input_dim(&self) -> usize {
        self.frames * self.grid * self.grid * FEATURE_CHANNELS
    }

    /// `(inputs, outputs)` of each dense layer in forward order: two trunk
    /// layers, then the two projection-head layers.
    pub fn layer_shapes(&self) -> [(usize, usize); 4] {
        [
            (self.input_dim(), self.hidden),
            (self.hidden, self.hidden),
            (self.hidden, self.proj_hidden),
            (self.proj_hidden, self.embed),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if [self.frames, self.grid, self.hidden, self.proj_hidden, self.embed].contains(&0) {
            return Err(Error::config("encoder dimensions must be positive"));
        }
        Ok(())
    }
}

/// `outputs × inputs` row-major weight and a bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weight: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weight: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weight
                .chunks_exact(self.inputs)
                .zip(&self.bias)
                .map(|(row, b)| b + dot(row, x)),
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncoderParams {
    pub dims: EncoderDims,
    pub layers: Vec<Dense>,
}

impl EncoderParams {
    pub fn zeros(dims: EncoderDims) -> Self {
        Self {
            dims,
            layers: dims
                .layer_shapes()
                .iter()
                .map(|&(i, o)| Dense::zeros(i, o))
                .collect(),
        }
    }

    /// Uniform in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
    pub fn init(dims: EncoderDims, seed: u64) -> Result<Self> {
        dims.validate()?;
        let mut p = Self::zeros(dims);
        let mut rng = seed::rng(seed::split(seed, "encoder-init"));
        for layer in &mut p.layers {
            let bound = math::sqrt(6.0 / (layer.inputs + layer.outputs) as f64);
            layer
                .weight
                .iter_mut()
                .for_each(|w| *w = rng.gen_range(-bound..=bound));
        }
        Ok(p)
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weight.len() + l.bias.len()).sum()
    }

    /// Parameter blocks in declaration order: `w0, b0, w1, b1, ...`.
    pub fn blocks(&self) -> impl Iterator<Item = &[f64]> {
        self.layers
            .iter()
            .flat_map(|l| [l.weight.as_slice(), l.bias.as_slice()])
    }

    pub fn blocks_mut(&mut self) -> impl Iterator<Item = &mut [f64]> {
        self.layers
            .iter_mut()
            .flat_map(|l| [l.weight.as_mut_slice(), l.bias.as_mut_slice()])
    }

    pub fn same_shape(&self, other: &EncoderParams) -> bool {
        self.dims == other.dims
            && self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.inputs == b.inputs && a.outputs == b.outputs)
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().all(|b| b.iter().all(|v| v.is_finite()))
    }

    /// Rebuild from flat blocks in declaration order.
    pub fn from_blocks(dims: EncoderDims, values: &[f64]) -> Result<Self> {
        let mut p = Self::zeros(dims);
        if values.len() != p.num_params() {
            return Err(Error::input(alloc::format!(
                "expected {} parameters, got {}",
                p.num_params(),
                values.len()
            )));
        }
        let mut offset = 0;
        for block in p.blocks_mut() {
            block.copy_from_slice(&values[offset..offset + block.len()]);
            offset += block.len();
        }
        Ok(p)
    }
}

/// Pool a clip onto `dims.frames × dims.grid × dims.grid` cells and append
/// temporal differences (cell at pooled frame `t` minus frame `t - 1`, zero
/// for the first). Raw channels are centered on zero.
pub fn clip_features(clip: &Clip, dims: &EncoderDims) -> Result<Vec<f64>> {
    let (frames, h, w) = clip.shape();
    if frames % dims.frames != 0 || h % dims.grid != 0 || w % dims.grid != 0 {
        return Err(Error::input(alloc::format!(
            "clip {frames}x{h}x{w} does not tile onto {}x{}x{}",
            dims.frames,
            dims.grid,
            dims.grid
        )));
    }
    let (ft, by, bx) = (frames / dims.frames, h / dims.grid, w / dims.grid);
    let scale = 1.0 / (255.0 * (ft * by * bx) as f64);
    let g = dims.grid;
    let cell = |tt: usize, gy: usize, gx: usize| -> [f64; 3] {
        let mut acc = [0u32; 3];
        for t in tt * ft..(tt + 1) * ft {
            for y in gy * by..(gy + 1) * by {
                for x in gx * bx..(gx + 1) * bx {
                    let p = clip.pixel(t, y, x);
                    for c in 0..CHANNELS {
                        acc[c] += u32::from(p[c]);
                    }
                }
            }
        }
        acc.map(|a| f64::from(a) * scale)
    };

    let mut raw = vec![[0.0f64; 3]; dims.frames * g * g];
    for tt in 0..dims.frames {
        for gy in 0..g {
            for gx in 0..g {
                raw[(tt * g + gy) * g + gx] = cell(tt, gy, gx);
            }
        }
    }
    let mut out = Vec::with_capacity(dims.input_dim());
    for tt in 0..dims.frames {
        for i in 0..g * g {
            let cur = raw[tt * g * g + i];
            out.extend(cur.iter().map(|v| v - 0.5));
            if tt == 0 {
                out.extend([0.0; CHANNELS]);
            } else {
                let prev = raw[(tt - 1) * g * g + i];
                out.extend((0..CHANNELS).map(|c| DIFF_GAIN * (cur[c] - prev[c])));
            }
        }
    }
    Ok(out)
}

/// Activations kept for backprop: the input to every layer, the pre-norm
/// output, and its norm.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    inputs: Vec<Vec<f64>>,
    output: Vec<f64>,
    norm: f64,
}

impl ForwardCache {
    pub fn embedding(&self) -> Embedding {
        Embedding(self.output.iter().map(|v| v / self.norm).collect())
    }
}

pub fn forward(params: &EncoderParams, features: &[f64]) -> Result<ForwardCache> {
    if features.len() != params.dims.input_dim() {
        return Err(Error::input(alloc::format!(
            "feature length {} does not match encoder input {}",
            features.len(),
            params.dims.input_dim()
        )));
    }
    let n = params.layers.len();
    let mut inputs = Vec::with_capacity(n);
    let mut x = features.to_vec();
    for (i, layer) in params.layers.iter().enumerate() {
        let mut y = Vec::new();
        layer.forward(&x, &mut y);
        if i + 1 < n {
            y.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        inputs.push(core::mem::replace(&mut x, y));
    }
    let nrm = norm(&x);
    if !(nrm > 0.0 && nrm.is_finite()) {
        return Err(Error::input("encoder output has no direction to normalize"));
    }
    Ok(ForwardCache {
        inputs,
        output: x,
        norm: nrm,
    })
}

/// Accumulate `scale · ∂(d_embedding · z)/∂params` into `grads`.
pub fn backward(
    params: &EncoderParams,
    cache: &ForwardCache,
    d_embedding: &[f64],
    scale: f64,
    grads: &mut EncoderParams,
) {
    // Through z = y / |y|: dy = (g - z (z·g)) / |y|.
    let z: Vec<f64> = cache.output.iter().map(|v| v / cache.norm).collect();
    let zg = dot(&z, d_embedding);
    let mut dy: Vec<f64> = z
        .iter()
        .zip(d_embedding)
        .map(|(zi, gi)| scale * (gi - zi * zg) / cache.norm)
        .collect();

    for li in (0..params.layers.len()).rev() {
        let layer = &params.layers[li];
        let x = &cache.inputs[li];
        let g = &mut grads.layers[li];
        for (o, &d) in dy.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            g.bias[o] += d;
            let row = &mut g.weight[o * layer.inputs..(o + 1) * layer.inputs];
            row.iter_mut().zip(x).for_each(|(w, xi)| *w += d * xi);
        }
        if li == 0 {
            break;
        }
        let mut dx = vec![0.0; layer.inputs];
        for (o, &d) in dy.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            let row = &layer.weight[o * layer.inputs..(o + 1) * layer.inputs];
            dx.iter_mut().zip(row).for_each(|(a, w)| *a += d * w);
        }
        // ReLU gate: the stored input of layer li is the post-activation of li-1.
        dx.iter_mut().zip(x).for_each(|(a, xi)| {
            if *xi <= 0.0 {
                *a = 0.0
            }
        });
        dy = dx;
    }
}

pub fn encode(params: &EncoderParams, clip: &Clip) -> Result<Embedding> {
    let f = clip_features(clip, &params.dims)?;
    Ok(forward(params, &f)?.embedding())
}
