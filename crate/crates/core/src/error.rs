use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("constraint violated at `{key}`: {message}")]
    Constraint { key: String, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("generation failed after {attempts} attempts: {what}")]
    GenerationFailed { attempts: usize, what: &'static str },

    #[error("degenerate transform (|det| = {det:e})")]
    DegenerateTransform { det: f64 },

    #[error("frame {frame}: {source}")]
    Frame {
        frame: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },

    #[error("training diverged at epoch {epoch}, batch {batch}")]
    TrainingDiverged { epoch: usize, batch: usize },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn constraint(key: &str, message: impl Into<String>) -> Self {
        Error::Constraint {
            key: key.into(),
            message: message.into(),
        }
    }
}
