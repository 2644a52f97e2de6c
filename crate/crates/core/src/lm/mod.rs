//! Token-level language models behind one interface.
//!
//! Two families exist: deterministic builtin models used as test oracles, and
//! a remote client that speaks JSON over HTTP to a model-serving shim.

mod builtin;
mod remote;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builtin::{builtin_catalog, BuiltinModel, UniformModel, UnigramModel, DEFAULT_MAX_INPUT};
pub use remote::{RemoteModel, RetryPolicy, ShimInfo, DEFAULT_MAX_IN_FLIGHT};

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("transport: {0}")]
    Transport(String),
}

impl BackendError {
    pub fn is_transport(&self) -> bool {
        matches!(self, BackendError::Transport(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Backend {
    Remote { url: String },
    Builtin { descriptor: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub model_id: String,
    /// Maximum tokens per forward pass; at least 2.
    pub max_input: usize,
    pub backend: Backend,
}

impl ModelSpec {
    pub fn new(model_id: impl Into<String>, max_input: usize, backend: Backend) -> Result<Self, BackendError> {
        if max_input < 2 {
            return Err(BackendError::Config(format!(
                "max_input must be at least 2, got {max_input}"
            )));
        }
        Ok(ModelSpec {
            model_id: model_id.into(),
            max_input,
            backend,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TokenSequence(Vec<u32>);

impl TokenSequence {
    pub fn new(ids: Vec<u32>) -> Self {
        TokenSequence(ids)
    }

    pub fn ids(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_ids(self) -> Vec<u32> {
        self.0
    }
}

impl From<Vec<u32>> for TokenSequence {
    fn from(ids: Vec<u32>) -> Self {
        TokenSequence(ids)
    }
}

/// Natural-log probability of each actual next token; one entry per
/// prediction target.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LogprobVector(Vec<f64>);

impl LogprobVector {
    /// Rejects positive or non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self, BackendError> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v <= 0.0)) {
            return Err(BackendError::Transport(format!(
                "logprob[{i}] = {v} is not a finite value <= 0"
            )));
        }
        Ok(LogprobVector(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn target_count(&self) -> usize {
        self.0.len()
    }
}

pub trait LanguageModel: Send + Sync {
    fn spec(&self) -> &ModelSpec;

    /// Token id prepended to each chunk when BOS prepending is enabled.
    fn bos_id(&self) -> Option<u32>;

    fn tokenize(&self, text: &str) -> Result<TokenSequence, BackendError>;

    /// `values[i] = ln p(tokens[i+1] | tokens[..=i])`.
    fn next_token_logprobs(&self, tokens: &TokenSequence) -> Result<LogprobVector, BackendError>;
}

pub(crate) fn check_scoring_input(tokens: &TokenSequence, max_input: usize) -> Result<(), BackendError> {
    if tokens.len() < 2 {
        return Err(BackendError::Precondition(format!(
            "need at least 2 tokens to predict one, got {}",
            tokens.len()
        )));
    }
    if tokens.len() > max_input {
        return Err(BackendError::Precondition(format!(
            "{} tokens exceed max_input {max_input}; chunk first",
            tokens.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_rejects_tiny_max_input() {
        let b = Backend::Builtin { descriptor: "uniform:4".into() };
        assert!(ModelSpec::new("m", 1, b.clone()).is_err());
        assert!(ModelSpec::new("m", 2, b).is_ok());
    }

    #[test]
    fn logprob_vector_rejects_positive_values() {
        assert!(LogprobVector::new(vec![-1.0, 0.0]).is_ok());
        assert!(LogprobVector::new(vec![-1.0, 0.1]).is_err());
        assert!(LogprobVector::new(vec![f64::NAN]).is_err());
    }
}
