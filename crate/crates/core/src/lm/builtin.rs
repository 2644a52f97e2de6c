//! Deterministic context-free models over byte tokens.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{check_scoring_input, Backend, BackendError, LanguageModel, LogprobVector, ModelSpec, TokenSequence};

pub const DEFAULT_MAX_INPUT: usize = 1024;

const BYTE_VOCAB: usize = 256;
const BOS: u32 = 0;

/// Descriptor templates accepted by [`BuiltinModel::from_descriptor`].
pub fn builtin_catalog() -> Vec<&'static str> {
    vec!["uniform:<V>", "unigram:<counts.json>"]
}

/// Every token has probability 1/V regardless of context. Bytes are folded
/// into the vocabulary (`byte mod V`) when V < 256.
#[derive(Debug, Clone)]
pub struct UniformModel {
    spec: ModelSpec,
    vocab: u32,
    logprob: f64,
}

impl UniformModel {
    pub fn new(vocab: u32, max_input: usize) -> Result<Self, BackendError> {
        if vocab == 0 {
            return Err(BackendError::Config("uniform vocabulary must be non-empty".into()));
        }
        let descriptor = format!("uniform:{vocab}");
        let spec = ModelSpec::new(
            descriptor.clone(),
            max_input,
            Backend::Builtin { descriptor },
        )?;
        Ok(UniformModel {
            spec,
            vocab,
            logprob: -(vocab as f64).ln(),
        })
    }

    pub fn vocab_size(&self) -> u32 {
        self.vocab
    }

    /// Probability of `token` in any context.
    pub fn prob(&self, token: u32) -> f64 {
        if token < self.vocab {
            1.0 / self.vocab as f64
        } else {
            0.0
        }
    }
}

impl LanguageModel for UniformModel {
    fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn bos_id(&self) -> Option<u32> {
        Some(BOS)
    }

    fn tokenize(&self, text: &str) -> Result<TokenSequence, BackendError> {
        let fold = self.vocab < BYTE_VOCAB as u32;
        Ok(text
            .bytes()
            .map(|b| if fold { b as u32 % self.vocab } else { b as u32 })
            .collect::<Vec<_>>()
            .into())
    }

    fn next_token_logprobs(&self, tokens: &TokenSequence) -> Result<LogprobVector, BackendError> {
        check_scoring_input(tokens, self.spec.max_input)?;
        LogprobVector::new(vec![self.logprob; tokens.len() - 1])
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CountsFile {
    counts: BTreeMap<String, u64>,
}

/// Empirical byte unigram distribution with add-one smoothing:
/// `p(b) = (count(b) + 1) / (total + 256)`.
#[derive(Debug, Clone)]
pub struct UnigramModel {
    spec: ModelSpec,
    logprobs: Vec<f64>,
}

fn parse_byte_key(key: &str) -> Result<u8, BackendError> {
    if let Some(hex) = key.strip_prefix("0x") {
        return u8::from_str_radix(hex, 16)
            .map_err(|_| BackendError::Config(format!("counts key `{key}` is not a byte in hex")));
    }
    match key.as_bytes() {
        [b] => Ok(*b),
        _ => Err(BackendError::Config(format!(
            "counts key `{key}` must be one ASCII character or 0xNN"
        ))),
    }
}

impl UnigramModel {
    /// Parses a counts document of the form `{"counts": {"a": 3, "0x0a": 1}}`.
    pub fn from_json(model_id: impl Into<String>, json: &str, max_input: usize) -> Result<Self, BackendError> {
        let file: CountsFile = serde_json::from_str(json)
            .map_err(|e| BackendError::Config(format!("malformed counts file: {e}")))?;
        let mut counts = [0u64; BYTE_VOCAB];
        for (key, count) in &file.counts {
            counts[parse_byte_key(key)? as usize] += count;
        }
        Self::from_counts(model_id, &counts, max_input)
    }

    pub fn from_counts(model_id: impl Into<String>, counts: &[u64; 256], max_input: usize) -> Result<Self, BackendError> {
        let model_id = model_id.into();
        let spec = ModelSpec::new(
            model_id.clone(),
            max_input,
            Backend::Builtin { descriptor: model_id },
        )?;
        let total: u64 = counts.iter().sum();
        let denom = (total + BYTE_VOCAB as u64) as f64;
        let logprobs = counts.iter().map(|&c| ((c + 1) as f64 / denom).ln()).collect();
        Ok(UnigramModel { spec, logprobs })
    }

    pub fn load(path: &Path, max_input: usize) -> Result<Self, BackendError> {
        let json = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(format!("unigram:{}", path.display()), &json, max_input)
    }

    pub fn logprob(&self, token: u32) -> f64 {
        self.logprobs
            .get(token as usize)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }

    pub fn vocab_size(&self) -> u32 {
        BYTE_VOCAB as u32
    }
}

impl LanguageModel for UnigramModel {
    fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn bos_id(&self) -> Option<u32> {
        Some(BOS)
    }

    fn tokenize(&self, text: &str) -> Result<TokenSequence, BackendError> {
        Ok(text.bytes().map(u32::from).collect::<Vec<_>>().into())
    }

    fn next_token_logprobs(&self, tokens: &TokenSequence) -> Result<LogprobVector, BackendError> {
        check_scoring_input(tokens, self.spec.max_input)?;
        LogprobVector::new(tokens.ids()[1..].iter().map(|&t| self.logprob(t)).collect())
    }
}

#[derive(Debug, Clone)]
pub enum BuiltinModel {
    Uniform(UniformModel),
    Unigram(UnigramModel),
}

impl BuiltinModel {
    /// Builds a model from `uniform:V` or `unigram:PATH`.
    pub fn from_descriptor(descriptor: &str, max_input: usize) -> Result<Self, BackendError> {
        let (kind, arg) = descriptor
            .split_once(':')
            .ok_or_else(|| BackendError::Config(format!("builtin descriptor `{descriptor}` lacks `:`")))?;
        match kind {
            "uniform" => {
                let v: u32 = arg
                    .parse()
                    .map_err(|_| BackendError::Config(format!("uniform vocabulary `{arg}` is not an integer")))?;
                Ok(BuiltinModel::Uniform(UniformModel::new(v, max_input)?))
            }
            "unigram" => Ok(BuiltinModel::Unigram(UnigramModel::load(Path::new(arg), max_input)?)),
            other => Err(BackendError::Config(format!(
                "unknown builtin `{other}`; available: {}",
                builtin_catalog().join(", ")
            ))),
        }
    }

    fn inner(&self) -> &dyn LanguageModel {
        match self {
            BuiltinModel::Uniform(m) => m,
            BuiltinModel::Unigram(m) => m,
        }
    }
}

impl LanguageModel for BuiltinModel {
    fn spec(&self) -> &ModelSpec {
        self.inner().spec()
    }

    fn bos_id(&self) -> Option<u32> {
        self.inner().bos_id()
    }

    fn tokenize(&self, text: &str) -> Result<TokenSequence, BackendError> {
        self.inner().tokenize(text)
    }

    fn next_token_logprobs(&self, tokens: &TokenSequence) -> Result<LogprobVector, BackendError> {
        self.inner().next_token_logprobs(tokens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn byte_tokenizer() {
        let m = UniformModel::new(256, DEFAULT_MAX_INPUT).unwrap();
        assert_eq!(m.tokenize("abc").unwrap().ids(), &[97, 98, 99]);
        assert!(m.tokenize("").unwrap().is_empty());
    }

    #[test]
    fn uniform_logprobs_are_minus_ln_v() {
        let m = UniformModel::new(256, DEFAULT_MAX_INPUT).unwrap();
        let toks = TokenSequence::new((0..10).collect());
        let lp = m.next_token_logprobs(&toks).unwrap();
        assert_eq!(lp.target_count(), 9);
        for v in lp.values() {
            assert_abs_diff_eq!(*v, -5.545177444479562, epsilon = 1e-12);
        }
    }

    #[test]
    fn one_token_is_a_precondition_violation() {
        let m = UniformModel::new(256, DEFAULT_MAX_INPUT).unwrap();
        let err = m.next_token_logprobs(&TokenSequence::new(vec![1])).unwrap_err();
        assert!(matches!(err, BackendError::Precondition(_)));
    }

    #[test]
    fn over_long_input_is_a_precondition_violation() {
        let m = UniformModel::new(2, 4).unwrap();
        let err = m.next_token_logprobs(&TokenSequence::new(vec![0; 5])).unwrap_err();
        assert!(matches!(err, BackendError::Precondition(_)));
    }

    #[test]
    fn descriptors() {
        match BuiltinModel::from_descriptor("uniform:256", DEFAULT_MAX_INPUT).unwrap() {
            BuiltinModel::Uniform(m) => {
                assert_eq!(m.vocab_size(), 256);
                assert_eq!(m.spec().max_input, 1024);
                assert_eq!(m.spec().model_id, "uniform:256");
            }
            _ => panic!("expected uniform"),
        }
        assert!(matches!(
            BuiltinModel::from_descriptor("uniform:0", DEFAULT_MAX_INPUT),
            Err(BackendError::Config(_))
        ));
        assert!(BuiltinModel::from_descriptor("uniform", 8).is_err());
        assert!(BuiltinModel::from_descriptor("bigram:x", 8).is_err());
        assert!(BuiltinModel::from_descriptor("unigram:/no/such/file.json", 8).is_err());
    }

    #[test]
    fn unigram_half_probability_for_a() {
        // (254 + 1) / (254 + 256) = 0.5
        let m = UnigramModel::from_json("u", r#"{"counts": {"a": 254}}"#, 16).unwrap();
        let lp = m.next_token_logprobs(&m.tokenize("xya").unwrap()).unwrap();
        assert_abs_diff_eq!(*lp.values().last().unwrap(), 0.5f64.ln(), epsilon = 1e-15);
        // unseen byte: 1 / 510
        assert_abs_diff_eq!(lp.values()[0], (1.0f64 / 510.0).ln(), epsilon = 1e-15);
    }

    #[test]
    fn unigram_hex_keys_accumulate() {
        let m = UnigramModel::from_json("u", r#"{"counts": {"a": 1, "0x61": 1, "0x0a": 2}}"#, 16).unwrap();
        // total 4, p(a) = 3/260, p(\n) = 3/260
        assert_abs_diff_eq!(m.logprob(97), (3.0f64 / 260.0).ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(m.logprob(10), (3.0f64 / 260.0).ln(), epsilon = 1e-15);
    }

    #[test]
    fn malformed_counts_are_config_errors() {
        for bad in [
            "not json",
            r#"{"counts": {"ab": 1}}"#,
            r#"{"counts": {"0xzz": 1}}"#,
            r#"{"counts": {"a": -1}}"#,
            r#"{"counts": {"a": 1.5}}"#,
            r#"{"other": 1}"#,
        ] {
            assert!(
                matches!(UnigramModel::from_json("u", bad, 16), Err(BackendError::Config(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn distributions_sum_to_one_over_the_vocabulary() {
        for v in [1u32, 2, 3, 7, 256] {
            let m = UniformModel::new(v, 8).unwrap();
            let total: f64 = (0..v).map(|t| m.prob(t)).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        }
        let m = UnigramModel::from_json("u", r#"{"counts": {"a": 10, "b": 3, " ": 40}}"#, 8).unwrap();
        let total: f64 = (0..256).map(|t| m.logprob(t).exp()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-9);
        assert!((0..256).all(|t| m.logprob(t) <= 0.0));
    }

    #[test]
    fn folded_tokens_stay_in_vocabulary() {
        let m = UniformModel::new(2, 8).unwrap();
        assert!(m.tokenize("hello").unwrap().ids().iter().all(|&t| t < 2));
    }
}
