//! Scores every file of a corpus against one model, continuing past
//! per-file failures and reporting them.

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{CorpusLoad, SourceClass};
use crate::entropy::{score_text, EntropyError, ScoreOptions, ScoreRow};
use crate::lm::LanguageModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FailureKind {
    Unreadable,
    Transport,
    Unscorable,
    Backend,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileFailure {
    pub file: String,
    pub kind: FailureKind,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileWarning {
    pub file: String,
    pub warning: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub model_id: String,
    pub max_input: usize,
    pub prepend_bos: bool,
    pub files_seen: usize,
    pub files_scored: usize,
    pub failures: Vec<FileFailure>,
    pub dropped_tails: Vec<String>,
    pub scan_warnings: Vec<FileWarning>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoringRun {
    /// Sorted by file id.
    pub rows: Vec<ScoreRow>,
    pub report: RunReport,
}

fn classify(file: &str, err: EntropyError) -> FileFailure {
    let kind = match &err {
        EntropyError::Unscorable(_) | EntropyError::EmptyChunk => FailureKind::Unscorable,
        EntropyError::Backend(b) if b.is_transport() => FailureKind::Transport,
        _ => FailureKind::Backend,
    };
    FileFailure { file: file.to_string(), kind, reason: err.to_string() }
}

fn score_one(model: &dyn LanguageModel, class: &SourceClass, opts: ScoreOptions) -> Result<(ScoreRow, bool), FileFailure> {
    let result = score_text(model, &class.id, &class.cleaned_text, opts).map_err(|e| classify(&class.id, e))?;
    Ok((ScoreRow::from_result(&result, class.lloc), result.dropped_tail))
}

/// Scores the cleaned text of each loaded file with at most `concurrency`
/// files in flight. Output order does not depend on scheduling.
pub fn score_corpus(model: &dyn LanguageModel, corpus: &CorpusLoad, opts: ScoreOptions, concurrency: usize) -> ScoringRun {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(concurrency.max(1))
        .build()
        .expect("thread pool");
    let outcomes: Vec<Result<(ScoreRow, bool), FileFailure>> =
        pool.install(|| corpus.classes.par_iter().map(|c| score_one(model, c, opts)).collect());

    let mut rows = Vec::new();
    let mut dropped_tails = Vec::new();
    let mut failures: Vec<FileFailure> = corpus
        .failures
        .iter()
        .map(|f| FileFailure { file: f.file.clone(), kind: FailureKind::Unreadable, reason: f.reason.clone() })
        .collect();
    for outcome in outcomes {
        match outcome {
            Ok((row, dropped)) => {
                if dropped {
                    dropped_tails.push(row.file.clone());
                }
                rows.push(row);
            }
            Err(f) => {
                log::warn!("{}: {}", f.file, f.reason);
                failures.push(f);
            }
        }
    }
    rows.sort_by(|a, b| a.file.cmp(&b.file));
    failures.sort_by(|a, b| a.file.cmp(&b.file));
    let scan_warnings = corpus
        .classes
        .iter()
        .flat_map(|c| c.warnings.iter().map(|w| FileWarning { file: c.id.clone(), warning: w.to_string() }))
        .collect();

    ScoringRun {
        report: RunReport {
            model_id: model.spec().model_id.clone(),
            max_input: model.spec().max_input,
            prepend_bos: opts.prepend_bos,
            files_seen: corpus.classes.len() + corpus.failures.len(),
            files_scored: rows.len(),
            failures,
            dropped_tails,
            scan_warnings,
        },
        rows,
    }
}
