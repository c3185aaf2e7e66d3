use std::path::Path;

use tubelet_core::config::RunConfig;

use super::{read_bytes, Result, StorageError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("`{key}` {message}")]
    Constraint { key: String, message: String },

    #[error("not UTF-8 text")]
    Encoding,
}

/// 1-based line and column of byte `offset`.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parse and validate; missing keys take their defaults.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    cfg.validate().map_err(|e| match e {
        tubelet_core::Error::Constraint { key, message } => ConfigError::Constraint { key, message },
        other => ConfigError::Constraint {
            key: String::new(),
            message: other.to_string(),
        },
    })?;
    Ok(cfg)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    let text = String::from_utf8(bytes).map_err(|_| StorageError::Config {
        path: path.to_path_buf(),
        source: ConfigError::Encoding,
    })?;
    parse_config_str(&text).map_err(|source| StorageError::Config {
        path: path.to_path_buf(),
        source,
    })
}
