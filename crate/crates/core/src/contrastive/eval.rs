//! Nearest-neighbour retrieval between pair members.

use alloc::vec::Vec;

use super::{encode, EncoderParams, Embedding};
use crate::compositor::PairSample;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Retrieval {
    pub top1: f64,
    pub top5: f64,
    pub count: usize,
}

/// Query `i` is matched against the whole gallery; its partner is gallery
/// item `i`. The rank counts strictly more similar items plus equally
/// similar items with a lower index.
pub fn retrieval_from_embeddings(queries: &[Embedding], gallery: &[Embedding]) -> Result<Retrieval> {
    if queries.len() != gallery.len() {
        return Err(Error::input("query and gallery sizes differ"));
    }
    let n = queries.len();
    let (mut hit1, mut hit5) = (0usize, 0usize);
    for (i, q) in queries.iter().enumerate() {
        let own = q.dot(&gallery[i]);
        let rank = gallery
            .iter()
            .enumerate()
            .filter(|&(j, g)| {
                let s = q.dot(g);
                s > own || (s == own && j < i)
            })
            .count();
        hit1 += usize::from(rank < 1);
        hit5 += usize::from(rank < 5);
    }
    let frac = |h: usize| if n == 0 { 0.0 } else { h as f64 / n as f64 };
    Ok(Retrieval {
        top1: frac(hit1),
        top5: frac(hit5),
        count: n,
    })
}

pub fn retrieval_eval(params: &EncoderParams, probes: &[PairSample]) -> Result<Retrieval> {
    let queries = probes
        .iter()
        .map(|p| encode(params, &p.clip_a))
        .collect::<Result<Vec<_>>>()?;
    let gallery = probes
        .iter()
        .map(|p| encode(params, &p.clip_b))
        .collect::<Result<Vec<_>>>()?;
    retrieval_from_embeddings(&queries, &gallery)
}
