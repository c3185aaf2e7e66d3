//! Positive-pair datasets: generation and the on-disk layout.
//!
//! A dataset directory holds `pairs.jsonl` (one [`PairRecord`] per line)
//! and, per pair, two TBC1 clips and two TBM1 coverage masks.

use std::path::Path;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tubelet_core::compositor::{make_pair, PairConfig, PairSample};
use tubelet_core::config::Mode;
use tubelet_core::trajectory::{Point, Trajectory};
use tubelet_core::tubelet::{ShapeKind, TransformTrack};
use tubelet_core::{seed, Clip, CoverageGrid};

use crate::storage::{read_clip, read_mask, write_clip, write_mask, StorageError};
use crate::{Error, Result};

pub const PAIRS_FILE: &str = "pairs.jsonl";

/// Everything about a tubelet except its pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeletRecord {
    pub shape: ShapeKind,
    /// `[width, height]` of the cropped patch.
    pub patch: [usize; 2],
    pub centers: Vec<Point>,
    pub tracks: Vec<TransformTrack>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub id: String,
    pub seed: u64,
    pub mode: Mode,
    /// Corpus indices of the two background videos.
    pub source_a: usize,
    pub source_b: usize,
    pub clip_a: String,
    pub clip_b: String,
    pub mask_a: String,
    pub mask_b: String,
    pub tubelets: Vec<TubeletRecord>,
}

impl PairRecord {
    pub fn trajectories(&self) -> Vec<Trajectory> {
        self.tubelets
            .iter()
            .map(|t| Trajectory {
                centers: t.centers.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct GeneratedPair {
    pub source_a: usize,
    pub source_b: usize,
    pub sample: PairSample,
}

/// Two distinct corpus indices for pair `index`.
pub fn pair_sources(corpus: usize, seed: u64, index: usize) -> (usize, usize) {
    let mut rng = seed::rng(seed::split_index(seed, "sources", index as u64));
    let a = rng.gen_range(0..corpus);
    let b = rng.gen_range(0..corpus - 1);
    (a, if b >= a { b + 1 } else { b })
}

/// `count` pairs over random distinct backgrounds, in index order.
pub fn generate_pairs(clips: &[Clip], cfg: &PairConfig, count: usize, seed: u64) -> Result<Vec<GeneratedPair>> {
    if clips.len() < 2 {
        return Err(Error::Invalid("pairs need at least two background clips".into()));
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let (a, b) = pair_sources(clips.len(), seed, i);
            let sample = make_pair(&clips[a], &clips[b], cfg, seed::split_index(seed, "pair", i as u64))?;
            Ok(GeneratedPair {
                source_a: a,
                source_b: b,
                sample,
            })
        })
        .collect()
}

fn record(i: usize, mode: Mode, p: &GeneratedPair) -> PairRecord {
    let stem = format!("pair-{i:05}");
    PairRecord {
        id: format!("{i:05}"),
        seed: p.sample.seed,
        mode,
        source_a: p.source_a,
        source_b: p.source_b,
        clip_a: format!("{stem}.a.tbc"),
        clip_b: format!("{stem}.b.tbc"),
        mask_a: format!("{stem}.a.tbm"),
        mask_b: format!("{stem}.b.tbm"),
        tubelets: p
            .sample
            .specs
            .iter()
            .map(|s| TubeletRecord {
                shape: s.shape,
                patch: [s.patch.width, s.patch.height],
                centers: s.trajectory.centers.clone(),
                tracks: s.tracks.clone(),
            })
            .collect(),
    }
}

pub fn write_pairs(dir: &Path, mode: Mode, pairs: &[GeneratedPair]) -> Result<Vec<PairRecord>> {
    let records: Vec<PairRecord> = pairs.iter().enumerate().map(|(i, p)| record(i, mode, p)).collect();
    pairs
        .par_iter()
        .zip(&records)
        .try_for_each(|(p, r)| -> Result<()> {
            write_clip(&p.sample.clip_a, dir.join(&r.clip_a))?;
            write_clip(&p.sample.clip_b, dir.join(&r.clip_b))?;
            write_mask(&p.sample.union_a, dir.join(&r.mask_a))?;
            write_mask(&p.sample.union_b, dir.join(&r.mask_b))?;
            Ok(())
        })?;
    let mut text = String::new();
    for r in &records {
        text.push_str(&serde_json::to_string(r).expect("pair records serialize"));
        text.push('\n');
    }
    let path = dir.join(PAIRS_FILE);
    std::fs::write(&path, text).map_err(|e| StorageError::io(&path, e))?;
    Ok(records)
}

/// A pair read back from disk. Patch pixels are not stored, so
/// [`LoadedPair::sample`] has no tubelet specs.
#[derive(Debug, Clone)]
pub struct LoadedPair {
    pub record: PairRecord,
    pub clip_a: Clip,
    pub clip_b: Clip,
    pub union_a: CoverageGrid,
    pub union_b: CoverageGrid,
}

impl LoadedPair {
    pub fn sample(&self) -> PairSample {
        PairSample {
            clip_a: self.clip_a.clone(),
            clip_b: self.clip_b.clone(),
            specs: Vec::new(),
            union_a: self.union_a.clone(),
            union_b: self.union_b.clone(),
            seed: self.record.seed,
        }
    }
}

pub fn read_records(dir: &Path) -> Result<Vec<PairRecord>> {
    let path = dir.join(PAIRS_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| StorageError::io(&path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| {
                Error::Storage(StorageError::Manifest {
                    path: path.clone(),
                    line: i + 1,
                    message: e.to_string(),
                })
            })
        })
        .collect()
}

pub fn read_pairs(dir: &Path) -> Result<Vec<LoadedPair>> {
    read_records(dir)?
        .into_par_iter()
        .map(|record| {
            Ok(LoadedPair {
                clip_a: read_clip(dir.join(&record.clip_a))?,
                clip_b: read_clip(dir.join(&record.clip_b))?,
                union_a: read_mask(dir.join(&record.mask_a))?,
                union_b: read_mask(dir.join(&record.mask_b))?,
                record,
            })
        })
        .collect()
}
