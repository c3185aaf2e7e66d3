//! Golden-file conformance checks shared by the `formats` tests and the
//! acceptance runner. Each returns a description of the first mismatch.

use std::path::{Path, PathBuf};

use tubelet::storage::{
    decode_checkpoint, decode_clip, encode_checkpoint, encode_clip, parse_config, read_checkpoint,
    read_clip, read_manifest, write_manifest, ConfigError, FormatError, StorageError,
};
use tubelet::tubelet_core::config::{Mode, RunConfig};
use tubelet::tubelet_core::contrastive::EncoderParams;
use tubelet::tubelet_core::trajectory::MotionKind;

pub type Check = Result<(), String>;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn json(name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(data(name)).unwrap()).unwrap()
}

fn ensure(cond: bool, what: &str) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn expect_format(r: Result<impl std::fmt::Debug, FormatError>, want: fn(&FormatError) -> bool, what: &str) -> Check {
    match r {
        Err(e) if want(&e) => Ok(()),
        other => Err(format!("{what}: got {other:?}")),
    }
}

pub fn clip_golden() -> Check {
    let reference = json("golden_clip.json");
    let shape: Vec<usize> = serde_json::from_value(reference["shape"].clone()).unwrap();
    let pixels: Vec<u8> = serde_json::from_value(reference["pixels"].clone()).unwrap();
    let clip = read_clip(data("golden_clip.tbc")).map_err(|e| e.to_string())?;
    ensure(
        [clip.frames(), clip.height(), clip.width(), 3] == shape[..],
        "golden clip shape",
    )?;
    ensure(clip.data() == pixels.as_slice(), "golden clip pixels")?;
    let bytes = std::fs::read(data("golden_clip.tbc")).unwrap();
    ensure(encode_clip(&clip) == bytes, "re-encoded golden clip differs")?;
    ensure(bytes.len() == 22 + 2 * 3 * 4 * 3, "golden clip size")?;

    let mut bad = bytes.clone();
    bad[..4].copy_from_slice(b"TBCX");
    expect_format(decode_clip(&bad), |e| matches!(e, FormatError::BadMagic { .. }), "bad magic")?;
    let mut bad = bytes.clone();
    bad[4..6].copy_from_slice(&9u16.to_le_bytes());
    expect_format(
        decode_clip(&bad),
        |e| matches!(e, FormatError::VersionMismatch { found: 9, .. }),
        "version mismatch",
    )?;
    expect_format(
        decode_clip(&bytes[..bytes.len() - 1]),
        |e| matches!(e, FormatError::Truncated { .. }),
        "truncated payload",
    )?;
    expect_format(
        decode_clip(&bytes[..7]),
        |e| matches!(e, FormatError::Truncated { .. }),
        "truncated header",
    )?;
    let mut bad = bytes;
    bad.push(0);
    expect_format(decode_clip(&bad), |e| matches!(e, FormatError::TrailingBytes { .. }), "trailing bytes")?;
    match read_clip(data("missing.tbc")) {
        Err(StorageError::Io { path, .. }) if path.ends_with("missing.tbc") => Ok(()),
        other => Err(format!("missing file: got {other:?}")),
    }
}

pub fn checkpoint_golden() -> Check {
    let reference = json("golden_checkpoint.json");
    let values: Vec<f64> = serde_json::from_value(reference["values"].clone()).unwrap();
    let dims: Vec<usize> = serde_json::from_value(reference["dims"].clone()).unwrap();
    let p = read_checkpoint(data("golden_checkpoint.tbck")).map_err(|e| e.to_string())?;
    let d = p.dims;
    ensure(
        [d.frames, d.grid, d.hidden, d.proj_hidden, d.embed] == dims[..],
        "golden checkpoint dims",
    )?;
    let flat: Vec<f64> = p.blocks().flatten().copied().collect();
    ensure(flat == values, "golden checkpoint values")?;
    ensure(
        p == EncoderParams::from_blocks(d, &values).unwrap(),
        "golden checkpoint layout",
    )?;
    let bytes = std::fs::read(data("golden_checkpoint.tbck")).unwrap();
    ensure(encode_checkpoint(&p) == bytes, "re-encoded golden checkpoint differs")?;
    expect_format(
        decode_checkpoint(&bytes[..bytes.len() - 3]),
        |e| matches!(e, FormatError::Truncated { .. }),
        "truncated checkpoint",
    )?;
    let mut bad = bytes.clone();
    bad[3] = b'X';
    expect_format(decode_checkpoint(&bad), |e| matches!(e, FormatError::BadMagic { .. }), "checkpoint magic")?;
    let mut bad = bytes;
    bad[4] = 2;
    expect_format(
        decode_checkpoint(&bad),
        |e| matches!(e, FormatError::VersionMismatch { .. }),
        "checkpoint version",
    )
}

pub fn manifest_golden() -> Check {
    let m = read_manifest(data("golden_manifest.jsonl")).map_err(|e| e.to_string())?;
    ensure(m.entries.len() == 2, "manifest entry count")?;
    ensure(m.entries[1].kind == "static-texture" && m.entries[1].seed == 1001, "manifest fields")?;
    ensure(m.entries[0].shape == [16, 32, 32], "manifest shape")?;
    ensure(m.resolve(&m.entries[0]) == data("clip-00000.tbc"), "manifest path resolution")?;

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("manifest.jsonl");
    write_manifest(&out, &m.entries).map_err(|e| e.to_string())?;
    ensure(
        std::fs::read(&out).unwrap() == std::fs::read(data("golden_manifest.jsonl")).unwrap(),
        "re-written manifest differs",
    )?;

    let dup = dir.path().join("dup.jsonl");
    let line = std::fs::read_to_string(data("golden_manifest.jsonl")).unwrap();
    let first = line.lines().next().unwrap();
    std::fs::write(&dup, format!("{first}\n{first}\n")).unwrap();
    match read_manifest(&dup) {
        Err(StorageError::Manifest { line: 2, .. }) => {}
        other => return Err(format!("duplicate id: got {other:?}")),
    }
    let broken = dir.path().join("broken.jsonl");
    std::fs::write(&broken, "{\"id\": 3}\n").unwrap();
    match read_manifest(&broken) {
        Err(StorageError::Manifest { line: 1, .. }) => Ok(()),
        other => Err(format!("malformed record: got {other:?}")),
    }
}

fn config_error(name: &str) -> Result<ConfigError, String> {
    match parse_config(data(name)) {
        Err(StorageError::Config { source, .. }) => Ok(source),
        other => Err(format!("{name}: expected a config error, got {other:?}")),
    }
}

pub fn config_golden() -> Check {
    let empty = tempfile::NamedTempFile::new().unwrap();
    let d = parse_config(empty.path()).map_err(|e| e.to_string())?;
    ensure(d == RunConfig::default(), "empty config is not all-defaults")?;
    ensure(
        d.train.temperature == 0.2
            && d.tubelet.count == 2
            && d.motion.keyframes == 3
            && d.motion.oversample == 48
            && d.motion.sigma == 8.0
            && d.motion.delta == (40.0, 80.0),
        "default values",
    )?;

    let full = parse_config(data("full.toml")).map_err(|e| e.to_string())?;
    ensure(
        full.seed == 7
            && full.motion.kind == MotionKind::Linear
            && full.train.encoder.embed == 16
            && full.corpus.kinds.len() == 2
            && full.eval.mode == Mode::NonlinearRotation
            && full.transform.shear == (-1.5, 1.5),
        "full config values",
    )?;

    match config_error("unknown_key.toml")? {
        ConfigError::Parse { line: 2, message, .. } if message.contains("taus") => {}
        other => return Err(format!("unknown key: got {other:?}")),
    }
    match config_error("negative_tau.toml")? {
        ConfigError::Constraint { key, .. } if key == "train.temperature" => {}
        other => return Err(format!("negative temperature: got {other:?}")),
    }
    match config_error("small_corpus.toml")? {
        ConfigError::Constraint { key, .. } if key == "corpus.count" => {}
        other => return Err(format!("corpus count: got {other:?}")),
    }
    match config_error("syntax_error.toml")? {
        ConfigError::Parse { line: 2, .. } => Ok(()),
        other => Err(format!("syntax error: got {other:?}")),
    }
}
