//! HTTP client for the model-serving shim.
//!
//! Wire protocol (JSON over HTTP):
//! - `GET /info` -> `{"model_id", "max_input", "vocab_size"}` (optional `bos_id`)
//! - `POST /tokenize` `{"text"}` -> `{"ids"}`
//! - `POST /logprobs` `{"ids"}` -> `{"logprobs"}`, one fewer than `ids`
//!
//! Token ids, not text, go over the wire for scoring so chunking stays here.

use std::sync::{Condvar, Mutex};
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{check_scoring_input, Backend, BackendError, LanguageModel, LogprobVector, ModelSpec, TokenSequence};

pub const DEFAULT_MAX_IN_FLIGHT: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShimInfo {
    pub model_id: String,
    pub max_input: usize,
    pub vocab_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bos_id: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    /// Retries after the first attempt.
    pub retries: u32,
    pub base_delay: Duration,
    pub timeout: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            retries: 3,
            base_delay: Duration::from_millis(250),
            timeout: Duration::from_secs(300),
        }
    }
}

impl RetryPolicy {
    fn delay(&self, attempt: u32) -> Duration {
        self.base_delay.saturating_mul(1 << attempt.min(16))
    }
}

#[derive(Serialize)]
struct TokenizeRequest<'a> {
    text: &'a str,
}

#[derive(Deserialize)]
struct TokenizeReply {
    ids: Vec<u32>,
}

#[derive(Serialize)]
struct LogprobsRequest<'a> {
    ids: &'a [u32],
}

#[derive(Deserialize)]
struct LogprobsReply {
    logprobs: Vec<f64>,
}

/// Counting semaphore bounding concurrent requests.
struct Slots {
    free: Mutex<usize>,
    cv: Condvar,
}

struct SlotGuard<'a>(&'a Slots);

impl Slots {
    fn new(n: usize) -> Self {
        Slots {
            free: Mutex::new(n.max(1)),
            cv: Condvar::new(),
        }
    }

    fn acquire(&self) -> SlotGuard<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        SlotGuard(self)
    }
}

impl Drop for SlotGuard<'_> {
    fn drop(&mut self) {
        let mut free = self.0.free.lock().unwrap_or_else(|e| e.into_inner());
        *free += 1;
        self.0.cv.notify_one();
    }
}

enum Attempt<T> {
    Done(T),
    /// Not worth retrying (client error).
    Fatal(BackendError),
    Retry(String),
}

pub struct RemoteModel {
    base: String,
    agent: ureq::Agent,
    spec: ModelSpec,
    info: ShimInfo,
    policy: RetryPolicy,
    slots: Slots,
}

impl RemoteModel {
    /// Queries `/info`. `max_input` may lower the shim's limit but not raise it.
    pub fn connect(
        endpoint: &str,
        max_input: Option<usize>,
        policy: RetryPolicy,
        max_in_flight: usize,
    ) -> Result<Self, BackendError> {
        let base = endpoint.trim_end_matches('/').to_string();
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(policy.timeout))
            .build()
            .into();
        let slots = Slots::new(max_in_flight);
        let info: ShimInfo = with_retries(&policy, || get_json(&agent, &format!("{base}/info")))?;
        let limit = match max_input {
            Some(m) if m > info.max_input => {
                return Err(BackendError::Config(format!(
                    "max_input {m} exceeds the shim limit {}",
                    info.max_input
                )))
            }
            Some(m) => m,
            None => info.max_input,
        };
        let spec = ModelSpec::new(info.model_id.clone(), limit, Backend::Remote { url: base.clone() })?;
        Ok(RemoteModel {
            base,
            agent,
            spec,
            info,
            policy,
            slots,
        })
    }

    pub fn info(&self) -> &ShimInfo {
        &self.info
    }

    fn post<B: Serialize, T: DeserializeOwned>(&self, path: &str, body: &B) -> Result<T, BackendError> {
        let _slot = self.slots.acquire();
        let url = format!("{}{path}", self.base);
        with_retries(&self.policy, || post_json(&self.agent, &url, body))
    }
}

fn with_retries<T>(policy: &RetryPolicy, mut call: impl FnMut() -> Attempt<T>) -> Result<T, BackendError> {
    let mut attempt = 0;
    loop {
        match call() {
            Attempt::Done(v) => return Ok(v),
            Attempt::Fatal(e) => return Err(e),
            Attempt::Retry(msg) if attempt >= policy.retries => {
                return Err(BackendError::Transport(format!(
                    "{msg} (gave up after {} attempts)",
                    attempt + 1
                )))
            }
            Attempt::Retry(msg) => {
                log::warn!("transport error, retrying: {msg}");
                thread::sleep(policy.delay(attempt));
                attempt += 1;
            }
        }
    }
}

fn classify<T: DeserializeOwned>(url: &str, result: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> Attempt<T> {
    let mut resp = match result {
        Ok(r) => r,
        Err(e) => return Attempt::Retry(format!("{url}: {e}")),
    };
    let status = resp.status().as_u16();
    if (400..500).contains(&status) {
        let body = resp.body_mut().read_to_string().unwrap_or_default();
        return Attempt::Fatal(BackendError::Precondition(format!(
            "{url} returned {status}: {}",
            body.trim()
        )));
    }
    if status != 200 {
        return Attempt::Retry(format!("{url} returned {status}"));
    }
    match resp.body_mut().read_json::<T>() {
        Ok(v) => Attempt::Done(v),
        Err(e) => Attempt::Retry(format!("{url}: malformed reply: {e}")),
    }
}

fn get_json<T: DeserializeOwned>(agent: &ureq::Agent, url: &str) -> Attempt<T> {
    classify(url, agent.get(url).call())
}

fn post_json<B: Serialize, T: DeserializeOwned>(agent: &ureq::Agent, url: &str, body: &B) -> Attempt<T> {
    classify(url, agent.post(url).send_json(body))
}

impl LanguageModel for RemoteModel {
    fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    fn bos_id(&self) -> Option<u32> {
        self.info.bos_id
    }

    fn tokenize(&self, text: &str) -> Result<TokenSequence, BackendError> {
        if text.is_empty() {
            return Ok(TokenSequence::default());
        }
        let reply: TokenizeReply = self.post("/tokenize", &TokenizeRequest { text })?;
        Ok(reply.ids.into())
    }

    fn next_token_logprobs(&self, tokens: &TokenSequence) -> Result<LogprobVector, BackendError> {
        check_scoring_input(tokens, self.spec.max_input)?;
        let reply: LogprobsReply = self.post("/logprobs", &LogprobsRequest { ids: tokens.ids() })?;
        if reply.logprobs.len() != tokens.len() - 1 {
            return Err(BackendError::Transport(format!(
                "shim returned {} logprobs for {} ids",
                reply.logprobs.len(),
                tokens.len()
            )));
        }
        LogprobVector::new(reply.logprobs)
    }
}
