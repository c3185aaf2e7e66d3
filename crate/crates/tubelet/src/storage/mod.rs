//! On-disk formats: TBC1 clips, TBM1 coverage masks, TBCK checkpoints,
//! JSON-lines manifests, TOML run configs, PPM plots and CSV histories.
//!
//! Every integer and real is little-endian. Readers validate the whole
//! header and payload length before building a value.

mod checkpoint;
mod clip;
mod config;
mod history;
mod manifest;
mod mask;
mod plot;

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC,
    CHECKPOINT_VERSION,
};
pub use clip::{decode_clip, encode_clip, read_clip, write_clip, CLIP_HEADER_LEN, CLIP_MAGIC, CLIP_VERSION};
pub use config::{parse_config, parse_config_str, ConfigError};
pub use history::{read_history, write_history};
pub use manifest::{read_manifest, write_manifest, Manifest, ManifestEntry};
pub use mask::{decode_mask, encode_mask, read_mask, write_mask, MASK_MAGIC, MASK_VERSION};
pub use plot::{render_coverage_strip, render_trajectory_plot, trajectory_raster, Raster};

/// A malformed binary container.
#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {found:?}, expected {expected:?}")]
    BadMagic { found: [u8; 4], expected: [u8; 4] },

    #[error("unsupported version {found}, expected {expected}")]
    VersionMismatch { found: u16, expected: u16 },

    #[error("truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: u64, found: u64 },

    #[error("{extra} unexpected bytes after payload")]
    TrailingBytes { extra: u64 },

    #[error("invalid header: {0}")]
    InvalidHeader(String),
}

#[derive(Debug, thiserror::Error)]
pub enum StorageError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },

    #[error("{}:{line}: {message}", path.display())]
    Manifest {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Config {
        path: PathBuf,
        #[source]
        source: ConfigError,
    },
}

impl StorageError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        StorageError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// The format error, if this is one.
    pub fn format(&self) -> Option<&FormatError> {
        match self {
            StorageError::Format { source, .. } => Some(source),
            _ => None,
        }
    }
}

pub type Result<T, E = StorageError> = std::result::Result<T, E>;

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| StorageError::io(path, e))
}

/// Create parent directories, then write.
fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| StorageError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| StorageError::io(path, e))
}

fn with_path<T>(path: &Path, r: Result<T, FormatError>) -> Result<T> {
    r.map_err(|source| StorageError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Cursor over a header, failing with `Truncated` relative to `total`.
struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, n: usize, need: usize) -> Result<&'a [u8], FormatError> {
        if self.bytes.len() < self.pos + n {
            return Err(FormatError::Truncated {
                expected: need as u64,
                found: self.bytes.len() as u64,
            });
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn magic(&mut self, expected: [u8; 4], need: usize) -> Result<(), FormatError> {
        let found: [u8; 4] = self.take(4, need)?.try_into().unwrap();
        if found != expected {
            return Err(FormatError::BadMagic { found, expected });
        }
        Ok(())
    }

    fn version(&mut self, expected: u16, need: usize) -> Result<(), FormatError> {
        let found = u16::from_le_bytes(self.take(2, need)?.try_into().unwrap());
        if found != expected {
            return Err(FormatError::VersionMismatch { found, expected });
        }
        Ok(())
    }

    fn u32(&mut self, need: usize) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4, need)?.try_into().unwrap()))
    }

    fn rest(&self) -> &'a [u8] {
        &self.bytes[self.pos..]
    }
}

/// Payload must be exactly `expected` bytes.
fn check_payload(header_len: usize, payload: &[u8], expected: u64) -> Result<(), FormatError> {
    let found = payload.len() as u64;
    if found < expected {
        return Err(FormatError::Truncated {
            expected: header_len as u64 + expected,
            found: header_len as u64 + found,
        });
    }
    if found > expected {
        return Err(FormatError::TrailingBytes {
            extra: found - expected,
        });
    }
    Ok(())
}

fn checked_len(dims: &[u32], elem: u64) -> Result<u64, FormatError> {
    dims.iter()
        .try_fold(elem, |acc, &d| acc.checked_mul(u64::from(d)))
        .ok_or_else(|| FormatError::InvalidHeader("declared size overflows".into()))
}
