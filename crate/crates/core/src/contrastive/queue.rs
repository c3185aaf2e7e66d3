use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::{norm, Embedding};
use crate::{Error, Result};

/// First-in-first-out store of key embeddings used as negatives.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeQueue {
    capacity: usize,
    entries: VecDeque<Embedding>,
}

impl NegativeQueue {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append, evicting the oldest entry when full.
    pub fn push(&mut self, key: Embedding) -> Result<()> {
        if let Some(first) = self.entries.front() {
            if first.dim() != key.dim() {
                return Err(Error::input("queue entries must share a dimension"));
            }
        }
        if (norm(key.as_slice()) - 1.0).abs() > 1e-9 {
            return Err(Error::input("queue entries must be unit norm"));
        }
        if self.capacity == 0 {
            return Ok(());
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(key);
        Ok(())
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Embedding> {
        self.entries.iter()
    }

    pub fn slices(&self) -> Vec<&[f64]> {
        self.entries.iter().map(|e| e.as_slice()).collect()
    }
}
