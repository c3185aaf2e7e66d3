use super::EncoderParams;
use crate::math;
use crate::{Error, Result};

/// Cosine decay from `base` at epoch 0 to zero at the last epoch.
pub fn cosine_lr(base: f64, epoch: usize, epochs: usize) -> f64 {
    if epochs <= 1 {
        return base;
    }
    let t = epoch.min(epochs - 1) as f64 / (epochs - 1) as f64;
    base * 0.5 * (1.0 + math::cos(core::f64::consts::PI * t))
}

/// `key ← m · key + (1 - m) · query` for every parameter.
pub fn momentum_update(query: &EncoderParams, key: &mut EncoderParams, m: f64) -> Result<()> {
    if !query.same_shape(key) {
        return Err(Error::input("query and key encoders differ in shape"));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::input("key momentum must lie in [0, 1]"));
    }
    if m == 1.0 {
        return Ok(());
    }
    for (k, q) in key.blocks_mut().zip(query.blocks()) {
        k.iter_mut().zip(q).for_each(|(k, q)| *k = m * *k + (1.0 - m) * q);
    }
    Ok(())
}

/// SGD with heavy-ball momentum and L2 weight decay:
/// `v ← μ v + (g + λ p)`, `p ← p - lr · v`.
#[derive(Debug, Clone)]
pub struct Sgd {
    pub momentum: f64,
    pub weight_decay: f64,
    velocity: EncoderParams,
}

impl Sgd {
    pub fn new(params: &EncoderParams, momentum: f64, weight_decay: f64) -> Self {
        Self {
            momentum,
            weight_decay,
            velocity: EncoderParams::zeros(params.dims),
        }
    }

    pub fn step(&mut self, params: &mut EncoderParams, grads: &EncoderParams, lr: f64) {
        let (mu, wd) = (self.momentum, self.weight_decay);
        for ((p, g), v) in params
            .blocks_mut()
            .zip(grads.blocks())
            .zip(self.velocity.blocks_mut())
        {
            for i in 0..p.len() {
                v[i] = mu * v[i] + g[i] + wd * p[i];
                if lr != 0.0 {
                    p[i] -= lr * v[i];
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contrastive::EncoderDims;

    fn dims() -> EncoderDims {
        EncoderDims {
            frames: 1,
            grid: 1,
            hidden: 2,
            proj_hidden: 2,
            embed: 2,
        }
    }

    #[test]
    fn cosine_endpoints() {
        assert_eq!(cosine_lr(0.01, 0, 30), 0.01);
        assert!(cosine_lr(0.01, 29, 30) <= 0.01 * 0.01);
        assert!(cosine_lr(0.01, 15, 30) < 0.01);
        assert_eq!(cosine_lr(0.5, 0, 1), 0.5);
    }

    #[test]
    fn momentum_update_extremes() {
        let q = EncoderParams::init(dims(), 1).unwrap();
        let k0 = EncoderParams::init(dims(), 2).unwrap();
        let mut k = k0.clone();
        momentum_update(&q, &mut k, 1.0).unwrap();
        assert_eq!(k, k0);
        momentum_update(&q, &mut k, 0.0).unwrap();
        assert_eq!(k, q);
    }

    #[test]
    fn momentum_update_scalar_probe() {
        let mut q = EncoderParams::zeros(dims());
        let mut k = EncoderParams::zeros(dims());
        q.layers[0].weight[0] = 4.0;
        k.layers[0].weight[0] = 2.0;
        momentum_update(&q, &mut k, 0.5).unwrap();
        assert_eq!(k.layers[0].weight[0], 3.0);
    }

    #[test]
    fn momentum_update_shape_mismatch() {
        let q = EncoderParams::zeros(dims());
        let mut k = EncoderParams::zeros(EncoderDims { embed: 3, ..dims() });
        assert!(momentum_update(&q, &mut k, 0.5).is_err());
    }

    #[test]
    fn zero_lr_leaves_params() {
        let mut p = EncoderParams::init(dims(), 4).unwrap();
        let before = p.clone();
        let g = EncoderParams::init(dims(), 5).unwrap();
        let mut opt = Sgd::new(&p, 0.9, 1e-4);
        for _ in 0..5 {
            opt.step(&mut p, &g, 0.0);
        }
        assert_eq!(p, before);
    }
}
