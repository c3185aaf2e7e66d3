use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_bytes, write_bytes, Result, StorageError};

/// One line of a manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifestEntry {
    pub id: String,
    /// Relative to the manifest's directory.
    pub path: String,
    pub kind: String,
    pub seed: u64,
    /// `[T, H, W]`.
    pub shape: [usize; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub dir: PathBuf,
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.dir.join(&entry.path)
    }
}

pub fn write_manifest(path: impl AsRef<Path>, entries: &[ManifestEntry]) -> Result<()> {
    let mut text = String::new();
    for e in entries {
        text.push_str(&serde_json::to_string(e).expect("manifest entries serialize"));
        text.push('\n');
    }
    write_bytes(path.as_ref(), text.as_bytes())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let bad = |line: usize, message: String| StorageError::Manifest {
        path: path.to_path_buf(),
        line,
        message,
    };
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| bad(0, "not UTF-8 text".into()))?;
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let e: ManifestEntry = serde_json::from_str(line).map_err(|e| bad(i + 1, e.to_string()))?;
        if !seen.insert(e.id.clone()) {
            return Err(bad(i + 1, format!("duplicate id `{}`", e.id)));
        }
        if Path::new(&e.path).is_absolute() {
            return Err(bad(i + 1, format!("path `{}` must be relative", e.path)));
        }
        entries.push(e);
    }
    Ok(Manifest {
        dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        entries,
    })
}
