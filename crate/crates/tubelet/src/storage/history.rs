use std::path::Path;

use tubelet_core::contrastive::EpochStats;

use super::{read_bytes, write_bytes, Result, StorageError};

const HEADER: &str = "epoch,mean_loss,lr";

/// Reals use the shortest text that round-trips exactly.
pub fn write_history(path: impl AsRef<Path>, history: &[EpochStats]) -> Result<()> {
    let mut text = String::from(HEADER);
    text.push('\n');
    for s in history {
        text.push_str(&format!("{},{},{}\n", s.epoch, s.mean_loss, s.lr));
    }
    write_bytes(path.as_ref(), text.as_bytes())
}

pub fn read_history(path: impl AsRef<Path>) -> Result<Vec<EpochStats>> {
    let path = path.as_ref();
    let bad = |line: usize, message: &str| StorageError::Manifest {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    };
    let bytes = read_bytes(path)?;
    let text = std::str::from_utf8(&bytes).map_err(|_| bad(0, "not UTF-8 text"))?;
    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(bad(1, "missing history header"));
    }
    lines
        .enumerate()
        .map(|(i, l)| {
            let f: Vec<&str> = l.split(',').collect();
            let parsed = match f.as_slice() {
                [e, m, r] => e.parse().ok().zip(m.parse().ok()).zip(r.parse().ok()),
                _ => None,
            };
            parsed
                .map(|((epoch, mean_loss), lr)| EpochStats { epoch, mean_loss, lr })
                .ok_or_else(|| bad(i + 2, "expected epoch,mean_loss,lr"))
        })
        .collect()
}
