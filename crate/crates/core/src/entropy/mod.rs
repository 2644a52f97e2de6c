//! Chunked cross-entropy of token sequences.
//!
//! A sequence longer than the model's input limit is cut into consecutive,
//! non-overlapping chunks. Context restarts at each chunk, so the first token
//! of a chunk is never a prediction target. Per-file cross-entropy is the
//! mean of the chunk values weighted by their target counts, i.e. the mean
//! negative log-probability over every predicted token.

mod scores;
mod stats;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lm::{BackendError, LanguageModel, LogprobVector, TokenSequence};

pub use scores::{read_scores, write_scores, ScoreRow, SCORES_HEADER};
pub use stats::{describe, DescriptiveStats};

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("unscorable file `{0}`: no chunk has a prediction target")]
    Unscorable(String),
    #[error("chunk has no prediction target")]
    EmptyChunk,
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("scores csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("scores csv row {row}: {message}")]
    Format { row: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChunkScore {
    pub index: usize,
    pub n_targets: usize,
    /// Nats; never negative.
    pub ce: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossEntropyResult {
    pub file_id: String,
    pub model_id: String,
    pub chunks: Vec<ChunkScore>,
    pub total_targets: usize,
    pub ce: f64,
    pub perplexity: f64,
    /// A 1-token remainder was left unscored.
    pub dropped_tail: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChunkPlan {
    pub chunks: Vec<TokenSequence>,
    /// A length-1 remainder has no target and is dropped.
    pub dropped_tail: bool,
}

/// Splits `tokens` into consecutive slices of at most `max_input` tokens.
///
/// # Panics
/// If `max_input < 2`; [`crate::lm::ModelSpec`] rules that out.
pub fn chunk_tokens(tokens: &TokenSequence, max_input: usize) -> ChunkPlan {
    assert!(max_input >= 2, "max_input must be at least 2");
    let mut plan = ChunkPlan::default();
    for slice in tokens.ids().chunks(max_input) {
        if slice.len() == 1 {
            // Only the last slice can be this short.
            plan.dropped_tail = true;
            log::warn!("dropping trailing 1-token chunk: it has no prediction target");
        } else {
            plan.chunks.push(TokenSequence::new(slice.to_vec()));
        }
    }
    plan
}

/// Chunks for BOS-prefixed scoring: slices of `max_input - 1` tokens, each
/// prefixed with `bos`, so every original token is a target.
pub fn chunk_tokens_with_bos(tokens: &TokenSequence, max_input: usize, bos: u32) -> ChunkPlan {
    assert!(max_input >= 2, "max_input must be at least 2");
    let chunks = tokens
        .ids()
        .chunks(max_input - 1)
        .map(|slice| {
            let mut ids = Vec::with_capacity(slice.len() + 1);
            ids.push(bos);
            ids.extend_from_slice(slice);
            TokenSequence::new(ids)
        })
        .collect();
    ChunkPlan {
        chunks,
        dropped_tail: false,
    }
}

/// Mean negative log-probability over the chunk's targets.
pub fn chunk_ce(index: usize, logprobs: &LogprobVector) -> Result<ChunkScore, EntropyError> {
    let n = logprobs.target_count();
    if n == 0 {
        return Err(EntropyError::EmptyChunk);
    }
    let sum: f64 = logprobs.values().iter().sum();
    // -0.0 from an all-zero chunk is normalized to 0.0.
    let ce = (-sum / n as f64).max(0.0);
    Ok(ChunkScore { index, n_targets: n, ce })
}

/// Token-weighted mean of chunk cross-entropies: `(ce, total_targets)`.
pub fn aggregate_ce(chunks: &[ChunkScore]) -> Option<(f64, usize)> {
    let total: usize = chunks.iter().map(|c| c.n_targets).sum();
    if chunks.is_empty() || total == 0 {
        return None;
    }
    let weighted: f64 = chunks.iter().map(|c| c.n_targets as f64 * c.ce).sum();
    Some((weighted / total as f64, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScoreOptions {
    pub prepend_bos: bool,
}

/// Scores one token sequence against a model.
pub fn score_tokens(
    model: &dyn LanguageModel,
    file_id: &str,
    tokens: &TokenSequence,
    opts: ScoreOptions,
) -> Result<CrossEntropyResult, EntropyError> {
    let max_input = model.spec().max_input;
    let plan = if opts.prepend_bos {
        let bos = model.bos_id().ok_or_else(|| {
            BackendError::Config(format!("model {} exposes no BOS token", model.spec().model_id))
        })?;
        chunk_tokens_with_bos(tokens, max_input, bos)
    } else {
        chunk_tokens(tokens, max_input)
    };
    let mut chunks = Vec::with_capacity(plan.chunks.len());
    for (i, chunk) in plan.chunks.iter().enumerate() {
        let lp = model.next_token_logprobs(chunk)?;
        chunks.push(chunk_ce(i, &lp)?);
    }
    let (ce, total_targets) = aggregate_ce(&chunks).ok_or_else(|| EntropyError::Unscorable(file_id.to_string()))?;
    Ok(CrossEntropyResult {
        file_id: file_id.to_string(),
        model_id: model.spec().model_id.clone(),
        chunks,
        total_targets,
        ce,
        perplexity: ce.exp(),
        dropped_tail: plan.dropped_tail,
    })
}

/// Tokenizes then scores.
pub fn score_text(
    model: &dyn LanguageModel,
    file_id: &str,
    text: &str,
    opts: ScoreOptions,
) -> Result<CrossEntropyResult, EntropyError> {
    let tokens = model.tokenize(text)?;
    score_tokens(model, file_id, &tokens, opts)
}
