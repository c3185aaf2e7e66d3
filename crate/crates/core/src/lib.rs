//! Algorithmic core for tubelet-contrastive self-supervision.
//!
//! Everything in this crate is a pure function of its inputs and a 64-bit
//! seed. It builds with `#![no_std]` and only needs `alloc`, so the same
//! generators and the contrastive learner can run wherever an allocator
//! exists. File formats, the command-line driver, and parallel dataset
//! assembly live in the companion `tubelet` crate.
//!
//! Module map:
//!
//! - [`trajectory`]: static, linear (keyframe interpolated) and non-linear
//!   (Gaussian smoothed) patch center paths.
//! - [`tubelet`]: patch cropping, shape masks, transformation tracks, affine
//!   warping, and rendering of a tubelet into per-frame patches.
//! - [`compositor`]: clip augmentation, alpha overlay, and positive pair
//!   construction (plus the randomly-scaled-crop control).
//! - [`contrastive`]: a small encoder with hand-written backprop, InfoNCE,
//!   momentum key encoder, FIFO negative queue, SGD, and retrieval eval.
//! - [`synth`]: procedural background clips.
//! - [`config`]: the run configuration tree with defaults and validation.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod clip;
pub mod compositor;
pub mod config;
pub mod contrastive;
mod error;
pub(crate) mod math;
pub mod seed;
pub mod synth;
pub mod trajectory;
pub mod tubelet;

pub use clip::{Clip, CoverageGrid};
pub use error::{Error, Result};
