//! Source corpus ingestion: comment stripping, LLOC, and the expert ratings.

mod ratings;
mod scanner;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

pub use ratings::{
    adapt_upstream_ratings, load_ratings, parse_ratings, write_ratings, Dimension, Likert,
    MaintainabilityRating, RatingsLoad, RATINGS_HEADER,
};
pub use scanner::{
    count_lloc, normalize_newlines, strip_comments, strip_comments_checked, ScanWarning, Stripped,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("ratings row {row}, column `{column}`: {message}")]
    Ratings {
        row: usize,
        column: String,
        message: String,
    },
    #[error("ratings header is missing column `{0}`")]
    MissingColumn(String),
    #[error("duplicate file id `{file}` at ratings row {row} (first seen at row {first})")]
    DuplicateFile { file: String, row: usize, first: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// A preprocessed source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceClass {
    /// Path relative to the corpus root, `/`-separated.
    pub id: String,
    pub raw_text: String,
    pub cleaned_text: String,
    pub lloc: usize,
    pub warnings: Vec<ScanWarning>,
}

impl SourceClass {
    pub fn from_text(id: impl Into<String>, raw_text: impl Into<String>) -> Self {
        let raw_text = raw_text.into();
        let Stripped { text, warnings } = strip_comments_checked(&raw_text);
        let lloc = count_lloc(&text);
        SourceClass {
            id: id.into(),
            raw_text,
            cleaned_text: text,
            lloc,
            warnings,
        }
    }

    /// Decodes bytes as UTF-8, replacing invalid sequences.
    pub fn from_bytes(id: impl Into<String>, bytes: &[u8]) -> Self {
        let id = id.into();
        let text = match std::str::from_utf8(bytes) {
            Ok(s) => s.to_owned(),
            Err(_) => {
                log::warn!("{id}: invalid UTF-8 replaced with U+FFFD");
                String::from_utf8_lossy(bytes).into_owned()
            }
        };
        Self::from_text(id, text)
    }
}

/// A file that matched the selection but could not be read.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorpusFailure {
    pub file: String,
    pub reason: String,
}

#[derive(Debug, Default)]
pub struct CorpusLoad {
    pub classes: Vec<SourceClass>,
    pub failures: Vec<CorpusFailure>,
}

fn has_extension(path: &Path, extensions: &[String]) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    extensions.iter().any(|ext| {
        let ext = ext.trim_start_matches('.');
        name.len() > ext.len() + 1
            && name.ends_with(ext)
            && name.as_bytes()[name.len() - ext.len() - 1] == b'.'
    })
}

fn relative_id(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    rel.components()
        .map(|c| c.as_os_str().to_string_lossy())
        .collect::<Vec<_>>()
        .join("/")
}

/// Lists candidate files under `root` sorted by relative id. Symlinks are
/// listed, not followed, so a dangling link shows up as an unreadable file.
pub fn list_corpus(root: &Path, extensions: &[String]) -> Result<Vec<(String, PathBuf)>, CorpusError> {
    let meta = fs::metadata(root).map_err(|source| CorpusError::Io {
        path: root.to_path_buf(),
        source,
    })?;
    if !meta.is_dir() {
        return Err(CorpusError::Io {
            path: root.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        });
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(root).follow_links(false) {
        let entry = match entry {
            Ok(e) => e,
            Err(e) => {
                log::warn!("skipping unreadable directory entry: {e}");
                continue;
            }
        };
        if entry.file_type().is_dir() || !has_extension(entry.path(), extensions) {
            continue;
        }
        files.push((relative_id(root, entry.path()), entry.path().to_path_buf()));
    }
    files.sort();
    Ok(files)
}

/// Reads and preprocesses every selected file. Unreadable files are reported,
/// never fatal.
pub fn load_corpus(root: &Path, extensions: &[String]) -> Result<CorpusLoad, CorpusError> {
    let mut load = CorpusLoad::default();
    for (id, path) in list_corpus(root, extensions)? {
        match fs::read(&path) {
            Ok(bytes) => {
                let class = SourceClass::from_bytes(id, &bytes);
                for w in &class.warnings {
                    log::warn!("{}: {w}", class.id);
                }
                load.classes.push(class);
            }
            Err(e) => load.failures.push(CorpusFailure {
                file: id,
                reason: e.to_string(),
            }),
        }
    }
    Ok(load)
}
