//! Training, evaluation and the ablation matrix, built from a run config.
//!
//! Pair generation and feature extraction run on the current rayon pool;
//! the optimizer consumes them in index order, so results do not depend on
//! the thread count.

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use tubelet_core::compositor::{make_pair, PairConfig, PairSample};
use tubelet_core::config::{Mode, RunConfig};
use tubelet_core::contrastive::{
    clip_features, encode, pair_features, retrieval_from_embeddings, train, train_with,
    EncoderDims, EncoderParams, EpochStats, FeaturePair, Retrieval, TrainOutcome,
};
use tubelet_core::{seed, Clip};

use crate::corpus::generate_corpus;
use crate::pairs::{generate_pairs, pair_sources};
use crate::{Error, Result};

pub fn features(pairs: &[PairSample], dims: &EncoderDims) -> Result<Vec<FeaturePair>> {
    pairs
        .par_iter()
        .map(|p| pair_features(p, dims).map_err(Error::from))
        .collect()
}

/// Fresh pairs for one epoch: every corpus video once as the tubelet source,
/// each with a random distinct partner.
pub fn epoch_pairs(clips: &[Clip], cfg: &PairConfig, seed: u64, epoch: usize) -> Result<Vec<PairSample>> {
    let s = seed::split_index(seed, "epoch", epoch as u64);
    (0..clips.len())
        .into_par_iter()
        .map(|i| {
            let (_, mut j) = pair_sources(clips.len(), s, i);
            if j == i {
                j = (i + 1) % clips.len();
            }
            make_pair(&clips[i], &clips[j], cfg, seed::split_index(s, "pair", i as u64)).map_err(Error::from)
        })
        .collect()
}

/// Train with pairs regenerated every epoch.
pub fn train_on_the_fly(
    cfg: &RunConfig,
    mode: Mode,
    clips: &[Clip],
    on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome> {
    let pair_cfg = cfg.pair_config(mode);
    let train_cfg = cfg.train_config();
    let pair_seed = seed::split(cfg.seed, "train-pairs");
    let out = train_with(
        &train_cfg,
        |epoch| {
            let pairs = epoch_pairs(clips, &pair_cfg, pair_seed, epoch)
                .map_err(|e| tubelet_core::Error::InvalidInput(e.to_string()))?;
            features(&pairs, &train_cfg.dims).map_err(|e| tubelet_core::Error::InvalidInput(e.to_string()))
        },
        on_epoch,
    )?;
    Ok(out)
}

/// Train on a fixed dataset.
pub fn train_on_pairs(cfg: &RunConfig, pairs: &[PairSample]) -> Result<TrainOutcome> {
    let train_cfg = cfg.train_config();
    let f = features(pairs, &train_cfg.dims)?;
    Ok(train(&f, &train_cfg)?)
}

/// Held-out retrieval probes: pairs of `mode` over a separately seeded
/// background corpus.
pub fn probe_pairs(cfg: &RunConfig, mode: Mode) -> Result<Vec<PairSample>> {
    let clips = generate_corpus(&cfg.probe_corpus_spec())?;
    let pairs = generate_pairs(
        &clips,
        &cfg.pair_config(mode),
        cfg.eval.probes,
        seed::split(cfg.seed, "probes"),
    )?;
    Ok(pairs.into_iter().map(|p| p.sample).collect())
}

pub fn evaluate(params: &EncoderParams, probes: &[PairSample]) -> Result<Retrieval> {
    let embed = |c: &Clip| encode(params, c).map_err(Error::from);
    let queries = probes.par_iter().map(|p| embed(&p.clip_a)).collect::<Result<Vec<_>>>()?;
    let gallery = probes.par_iter().map(|p| embed(&p.clip_b)).collect::<Result<Vec<_>>>()?;
    Ok(retrieval_from_embeddings(&queries, &gallery)?)
}

/// Check that a clip fits the encoder before a long run starts.
pub fn check_clip_fits(clip: &Clip, dims: &EncoderDims) -> Result<()> {
    clip_features(clip, dims).map(|_| ()).map_err(Error::from)
}

#[derive(Debug, Clone, Serialize)]
pub struct AblationRow {
    pub mode: Mode,
    pub top1: f64,
    pub top5: f64,
    pub final_loss: f64,
    pub seconds: f64,
}

/// Train one encoder per mode on the same corpus and seed, and score each
/// on the same probes.
pub fn ablate(
    cfg: &RunConfig,
    modes: &[Mode],
    clips: &[Clip],
    probes: &[PairSample],
    mut on_row: impl FnMut(&AblationRow),
) -> Result<Vec<AblationRow>> {
    let mut rows = Vec::with_capacity(modes.len());
    for &mode in modes {
        let start = Instant::now();
        let out = train_on_the_fly(cfg, mode, clips, |s| {
            log::debug!("{mode}: epoch {} loss {:.4} lr {:.5}", s.epoch, s.mean_loss, s.lr)
        })?;
        let r = evaluate(&out.params, probes)?;
        let row = AblationRow {
            mode,
            top1: r.top1,
            top5: r.top5,
            final_loss: out.history.last().map_or(f64::NAN, |s| s.mean_loss),
            seconds: start.elapsed().as_secs_f64(),
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}
