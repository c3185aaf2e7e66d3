//! Background corpora on disk.

use std::path::Path;

use rayon::prelude::*;
use tubelet_core::synth::CorpusSpec;
use tubelet_core::Clip;

use crate::storage::{read_clip, read_manifest, write_clip, write_manifest, Manifest, ManifestEntry};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.jsonl";

pub fn clip_file_name(index: usize) -> String {
    format!("clip-{index:05}.tbc")
}

/// All clips of `spec`, in index order, generated on the current rayon pool.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<Clip>> {
    spec.validate()?;
    (0..spec.count)
        .into_par_iter()
        .map(|i| spec.generate(i).map_err(Error::from))
        .collect()
}

/// Write every clip plus `manifest.jsonl` into `dir`. Re-running with the
/// same spec rewrites identical bytes.
pub fn build_corpus(spec: &CorpusSpec, dir: &Path) -> Result<Manifest> {
    spec.validate()?;
    let (t, h, w) = spec.shape;
    let entries = (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let (kind, seed) = spec.entry(i);
            let clip = spec.generate(i)?;
            let name = clip_file_name(i);
            write_clip(&clip, dir.join(&name))?;
            Ok(ManifestEntry {
                id: format!("{i:05}"),
                path: name,
                kind: kind.name().to_string(),
                seed,
                shape: [t, h, w],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    write_manifest(dir.join(MANIFEST_FILE), &entries)?;
    Ok(Manifest {
        dir: dir.to_path_buf(),
        entries,
    })
}

/// Load the clips listed by a manifest, or by `dir/manifest.jsonl` when
/// given a directory.
pub fn load_corpus(path: &Path) -> Result<Vec<Clip>> {
    let manifest_path = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let manifest = read_manifest(&manifest_path)?;
    manifest
        .entries
        .par_iter()
        .map(|e| {
            let clip = read_clip(manifest.resolve(e))?;
            if [clip.frames(), clip.height(), clip.width()] != e.shape {
                return Err(Error::Invalid(format!(
                    "clip `{}` does not match its manifest shape",
                    e.id
                )));
            }
            Ok(clip)
        })
        .collect()
}
