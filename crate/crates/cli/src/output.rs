//! Input loading, provenance headers and output writing.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use fragmol::corpus::{read_corpus, CorpusEntry};
use fragmol::record::FileHeader;
use fragmol::vocab::{read_vocab, VocabHeader, FORMAT_VERSION};
use fragmol::Vocabulary;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub fn display(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".to_string()
    } else {
        path.display().to_string()
    }
}

pub fn open(path: &Path) -> Result<Box<dyn BufRead>, CliError> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(std::io::stdin())));
    }
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Box::new(BufReader::new(file)))
}

/// Reads and parses every input file in order. Fails when nothing is left.
pub fn read_inputs(paths: &[PathBuf], skip_invalid: bool) -> Result<Vec<CorpusEntry>, CliError> {
    let mut entries = Vec::new();
    for path in paths {
        let name = display(path);
        let corpus = read_corpus(open(path)?, skip_invalid).map_err(|source| CliError::Corpus {
            path: name.clone(),
            source,
        })?;
        for (line, err) in &corpus.skipped {
            log::warn!("{name}:{line}: skipped: {err}");
        }
        entries.extend(corpus.entries);
    }
    if entries.is_empty() {
        let path = paths
            .iter()
            .map(|p| display(p))
            .collect::<Vec<_>>()
            .join(", ");
        return Err(CliError::EmptyInput { path });
    }
    Ok(entries)
}

pub fn load_vocab(path: &Path) -> Result<(Vocabulary, VocabHeader), CliError> {
    read_vocab(open(path)?).map_err(|source| CliError::Vocab {
        path: display(path),
        source,
    })
}

/// SHA-256 of the run configuration. `config` must serialize
/// deterministically; worker count and paths are not part of it.
pub fn fingerprint(config: &serde_json::Value) -> String {
    let text = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn jsonl_header(kind: &str, fingerprint: &str) -> String {
    let header = FileHeader::new(kind, fingerprint);
    serde_json::to_string(&header).expect("header serializes") + "\n"
}

/// Comment line that starts CSV and SMILES outputs.
pub fn comment_header(fingerprint: &str) -> String {
    format!("# format_version={FORMAT_VERSION} config_fingerprint={fingerprint}\n")
}

/// Writes to the file, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, contents: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}
