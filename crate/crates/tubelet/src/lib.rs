//! File formats, corpus and pair datasets, and the training pipeline that
//! the `tubelet` command drives. The algorithms live in [`tubelet_core`].

pub mod corpus;
pub mod pairs;
pub mod pipeline;
pub mod storage;

pub use tubelet_core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] tubelet_core::Error),

    #[error(transparent)]
    Storage(#[from] storage::StorageError),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
