use std::path::PathBuf;

use fragmol::corpus::{CorpusError, SplitError};
use fragmol::{SchemeMismatch, VocabError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: no molecules")]
    EmptyInput { path: String },
    #[error("no eligible motifs in the corpus")]
    NoMotifs,
    #[error("{path}: {source}")]
    Corpus {
        path: String,
        #[source]
        source: CorpusError,
    },
    #[error("{path}: {source}")]
    Vocab {
        path: String,
        #[source]
        source: VocabError,
    },
    #[error("{path}: line {line}: {message}")]
    Record {
        path: String,
        line: usize,
        message: String,
    },
    #[error(transparent)]
    Mismatch(#[from] SchemeMismatch),
    #[error(transparent)]
    Split(#[from] SplitError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_)
            | CliError::EmptyInput { .. }
            | CliError::NoMotifs
            | CliError::Split(_) => 1,
            CliError::Corpus {
                source: CorpusError::Io(_),
                ..
            } => 4,
            CliError::Corpus { .. } | CliError::Record { .. } => 2,
            CliError::Vocab { source, .. } => match source {
                VocabError::Io(_) => 4,
                VocabError::EmptyCorpus | VocabError::InvalidK => 1,
                _ => 2,
            },
            CliError::Mismatch(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn record(path: &str, line: usize, err: impl std::fmt::Display) -> CliError {
        CliError::Record {
            path: path.to_string(),
            line,
            message: err.to_string(),
        }
    }
}
