use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Failure while reading one of the plain-text resource files.
#[derive(Debug, Error)]
pub enum ResourceError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("{origin}: frame {frame}: {rule}")]
    Frame {
        origin: String,
        frame: String,
        rule: String,
    },
    #[error("{origin}:{line}: duplicate meaning {id} for lemma {lemma}")]
    DuplicateMeaning {
        origin: String,
        line: usize,
        lemma: String,
        id: String,
    },
    #[error("{origin}: node {node}: relation target {target} does not exist")]
    DanglingTarget {
        origin: String,
        node: String,
        target: String,
    },
    #[error("{origin}: hypernym cycle through {node}")]
    HypernymCycle { origin: String, node: String },
}

impl ResourceError {
    pub(crate) fn syntax(origin: &str, line: usize, message: impl Into<String>) -> Self {
        ResourceError::Syntax {
            origin: origin.to_string(),
            line,
            message: message.into(),
        }
    }

    /// True for failures of the underlying file system rather than content.
    pub fn is_io(&self) -> bool {
        matches!(self, ResourceError::Io { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("column {column}: {message}")]
pub struct ConstraintSyntaxError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("unknown relaxation profile `{0}`")]
    UnknownProfile(String),
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<String, ResourceError> {
    std::fs::read_to_string(path).map_err(|source| ResourceError::Io {
        path: path.to_path_buf(),
        source,
    })
}
