//! Desk-scale momentum-contrastive learning.
//!
//! A query encoder is trained with InfoNCE against a FIFO queue of key
//! embeddings produced by a momentum (exponential moving average) copy of
//! itself. Gradients are computed by hand; there is no autodiff.

mod encoder;
mod eval;
mod loss;
mod optim;
mod queue;
mod train;

use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

pub use encoder::{
    backward, clip_features, encode, forward, Dense, EncoderDims, EncoderParams, ForwardCache,
    DIFF_GAIN,
};
pub use eval::{retrieval_eval, retrieval_from_embeddings, Retrieval};
pub use loss::{infonce, infonce_from_logits, infonce_grad, InfoNceGrad};
pub use optim::{cosine_lr, momentum_update, Sgd};
pub use queue::NegativeQueue;
pub use train::{pair_features, train, train_with, EpochStats, FeaturePair, TrainConfig, TrainOutcome, Trainer};

/// A unit-norm feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding(Vec<f64>);

impl Embedding {
    /// L2-normalize `v`.
    pub fn normalize(mut v: Vec<f64>) -> Result<Self> {
        let n = norm(&v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::input("cannot normalize a zero or non-finite vector"));
        }
        v.iter_mut().for_each(|x| *x /= n);
        Ok(Self(v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Embedding) -> f64 {
        dot(&self.0, &other.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    math::sqrt(dot(a, a))
}
