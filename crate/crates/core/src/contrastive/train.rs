//! Momentum-contrastive training loop.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{
    backward, cosine_lr, forward, infonce_grad, momentum_update, EncoderDims, EncoderParams,
    Embedding, NegativeQueue, Sgd,
};
use crate::compositor::PairSample;
use crate::seed;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub temperature: f64,
    pub lr: f64,
    pub momentum: f64,
    pub weight_decay: f64,
    /// Key-encoder EMA coefficient.
    pub key_momentum: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub queue: usize,
    pub seed: u64,
    pub dims: EncoderDims,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            temperature: 0.2,
            lr: 0.01,
            momentum: 0.9,
            weight_decay: 1e-4,
            key_momentum: 0.999,
            batch_size: 32,
            epochs: 30,
            queue: 256,
            seed: 0,
            dims: EncoderDims::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::constraint("train.temperature", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.key_momentum) {
            return Err(Error::constraint("train.key_momentum", "must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.momentum) {
            return Err(Error::constraint("train.momentum", "must lie in [0, 1]"));
        }
        if !(self.lr >= 0.0 && self.lr.is_finite()) {
            return Err(Error::constraint("train.lr", "must be non-negative"));
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return Err(Error::constraint("train.weight_decay", "must be non-negative"));
        }
        if self.batch_size == 0 {
            return Err(Error::constraint("train.batch_size", "must be positive"));
        }
        if self.epochs == 0 {
            return Err(Error::constraint("train.epochs", "must be positive"));
        }
        if self.queue == 0 {
            return Err(Error::constraint("train.queue", "must be positive"));
        }
        self.dims.validate()
    }
}

/// Encoder inputs for both clips of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePair {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn pair_features(pair: &PairSample, dims: &EncoderDims) -> Result<FeaturePair> {
    Ok(FeaturePair {
        a: super::clip_features(&pair.clip_a, dims)?,
        b: super::clip_features(&pair.clip_b, dims)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    pub lr: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: EncoderParams,
    pub history: Vec<EpochStats>,
}

/// Query and key encoders, optimizer state, and the negative queue.
#[derive(Debug, Clone)]
pub struct Trainer {
    cfg: TrainConfig,
    query: EncoderParams,
    key: EncoderParams,
    opt: Sgd,
    queue: NegativeQueue,
    grads: EncoderParams,
}

impl Trainer {
    /// Fresh encoders from `cfg.seed`; the queue starts full of random unit
    /// vectors so the first batches already have negatives.
    pub fn new(cfg: TrainConfig) -> Result<Self> {
        cfg.validate()?;
        let query = EncoderParams::init(cfg.dims, cfg.seed)?;
        let mut queue = NegativeQueue::new(cfg.queue);
        let mut rng = seed::rng(seed::split(cfg.seed, "queue-init"));
        for _ in 0..cfg.queue {
            let v: Vec<f64> = (0..cfg.dims.embed).map(|_| StandardNormal.sample(&mut rng)).collect();
            queue.push(Embedding::normalize(v)?)?;
        }
        Ok(Self {
            key: query.clone(),
            opt: Sgd::new(&query, cfg.momentum, cfg.weight_decay),
            grads: EncoderParams::zeros(cfg.dims),
            query,
            queue,
            cfg,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn query(&self) -> &EncoderParams {
        &self.query
    }

    pub fn key(&self) -> &EncoderParams {
        &self.key
    }

    pub fn queue(&self) -> &NegativeQueue {
        &self.queue
    }

    pub fn into_params(self) -> EncoderParams {
        self.query
    }

    /// One optimizer step on `batch` without touching the queue. Each pair
    /// contributes both directions (A as query against key B, and B against
    /// A); the loss is their mean. Returns the loss and the keys to enqueue,
    /// `k_B` then `k_A` per pair in batch order.
    pub fn update(&mut self, batch: &[&FeaturePair], lr: f64) -> Result<(f64, Vec<Embedding>)> {
        if batch.is_empty() {
            return Err(Error::input("empty batch"));
        }
        let negatives = self.queue.slices();
        self.grads.blocks_mut().for_each(|b| b.fill(0.0));
        let scale = 1.0 / (2 * batch.len()) as f64;
        let mut total = 0.0;
        let mut keys = Vec::with_capacity(2 * batch.len());
        for pair in batch {
            let k_a = forward(&self.key, &pair.a)?.embedding();
            let k_b = forward(&self.key, &pair.b)?.embedding();
            for (input, key) in [(&pair.a, &k_b), (&pair.b, &k_a)] {
                let cache = forward(&self.query, input)?;
                let q = cache.embedding();
                let g = infonce_grad(q.as_slice(), key.as_slice(), &negatives, self.cfg.temperature)?;
                total += g.loss;
                backward(&self.query, &cache, &g.d_query, scale, &mut self.grads);
            }
            keys.push(k_b);
            keys.push(k_a);
        }
        let loss = total * scale;
        self.opt.step(&mut self.query, &self.grads, lr);
        momentum_update(&self.query, &mut self.key, self.cfg.key_momentum)?;
        Ok((loss, keys))
    }

    pub fn enqueue(&mut self, keys: Vec<Embedding>) -> Result<()> {
        keys.into_iter().try_for_each(|k| self.queue.push(k))
    }

    /// Shuffle `pairs` with a per-epoch seed and run every batch.
    pub fn run_epoch(&mut self, epoch: usize, pairs: &[FeaturePair]) -> Result<EpochStats> {
        if pairs.is_empty() {
            return Err(Error::input("training needs at least one pair"));
        }
        if self.cfg.queue >= 2 * pairs.len() {
            // Otherwise the queue would still hold this epoch's own keys from
            // the previous epoch, turning positives into negatives.
            return Err(Error::input(alloc::format!(
                "queue capacity {} must be below the {} keys produced per epoch",
                self.cfg.queue,
                2 * pairs.len()
            )));
        }
        let lr = cosine_lr(self.cfg.lr, epoch, self.cfg.epochs);
        let mut order: Vec<&FeaturePair> = pairs.iter().collect();
        order.shuffle(&mut seed::rng(seed::split_index(self.cfg.seed, "shuffle", epoch as u64)));
        let mut sum = 0.0;
        let mut batches = 0;
        for (bi, batch) in order.chunks(self.cfg.batch_size).enumerate() {
            let (loss, keys) = self.update(batch, lr)?;
            if !loss.is_finite() || !self.query.is_finite() {
                return Err(Error::TrainingDiverged { epoch, batch: bi });
            }
            self.enqueue(keys)?;
            sum += loss;
            batches += 1;
        }
        Ok(EpochStats {
            epoch,
            mean_loss: sum / batches as f64,
            lr,
        })
    }
}

/// Train on the same pairs every epoch.
pub fn train(pairs: &[FeaturePair], cfg: &TrainConfig) -> Result<TrainOutcome> {
    train_with(cfg, |_| Ok(pairs.to_vec()), |_| {})
}

/// Train on pairs supplied per epoch by `source`; `on_epoch` sees each
/// epoch's statistics as they complete.
pub fn train_with<S, C>(cfg: &TrainConfig, mut source: S, mut on_epoch: C) -> Result<TrainOutcome>
where
    S: FnMut(usize) -> Result<Vec<FeaturePair>>,
    C: FnMut(&EpochStats),
{
    let mut trainer = Trainer::new(cfg.clone())?;
    let mut history = vec![];
    for epoch in 0..cfg.epochs {
        let pairs = source(epoch)?;
        let stats = trainer.run_epoch(epoch, &pairs)?;
        on_epoch(&stats);
        history.push(stats);
    }
    Ok(TrainOutcome {
        params: trainer.into_params(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    fn small() -> TrainConfig {
        TrainConfig {
            batch_size: 4,
            epochs: 3,
            queue: 16,
            dims: EncoderDims {
                frames: 2,
                grid: 2,
                hidden: 16,
                proj_hidden: 16,
                embed: 8,
            },
            ..TrainConfig::default()
        }
    }

    fn random_pairs(n: usize, dims: &EncoderDims, seed: u64) -> Vec<FeaturePair> {
        let mut rng = seed::rng(seed);
        let mut v = || (0..dims.input_dim()).map(|_| rng.gen_range(-0.5..0.5)).collect();
        (0..n).map(|_| FeaturePair { a: v(), b: v() }).collect()
    }

    #[test]
    fn zero_lr_keeps_params() {
        let cfg = TrainConfig { lr: 0.0, ..small() };
        let pairs = random_pairs(10, &cfg.dims, 1);
        let out = train(&pairs, &cfg).unwrap();
        assert_eq!(out.params, EncoderParams::init(cfg.dims, cfg.seed).unwrap());
        assert_eq!(out.history.len(), 3);
    }

    #[test]
    fn deterministic_history() {
        let cfg = small();
        let pairs = random_pairs(10, &cfg.dims, 2);
        let a = train(&pairs, &cfg).unwrap();
        let b = train(&pairs, &cfg).unwrap();
        assert_eq!(a.history, b.history);
        assert_eq!(a.params, b.params);
    }

    #[test]
    fn single_pair_loss_decreases() {
        let cfg = TrainConfig {
            queue: 4096,
            dims: EncoderDims {
                frames: 2,
                grid: 2,
                ..EncoderDims::default()
            },
            ..small()
        };
        let pair = random_pairs(1, &cfg.dims, 3).remove(0);
        let mut t = Trainer::new(cfg).unwrap();
        let mut last = f64::INFINITY;
        for step in 0..10 {
            let (loss, _) = t.update(&[&pair], 0.01).unwrap();
            assert!(loss < last, "step {step}: {loss} >= {last}");
            last = loss;
        }
    }

    #[test]
    fn queue_holds_latest_keys() {
        let cfg = small();
        let pairs = random_pairs(12, &cfg.dims, 4);
        let mut t = Trainer::new(cfg).unwrap();
        t.run_epoch(0, &pairs).unwrap();
        assert_eq!(t.queue().len(), 16);
    }

    #[test]
    fn invalid_config_names_key() {
        let cfg = TrainConfig {
            temperature: -1.0,
            ..small()
        };
        match Trainer::new(cfg) {
            Err(Error::Constraint { key, .. }) => assert_eq!(key, "train.temperature"),
            other => panic!("{other:?}"),
        }
    }
}
