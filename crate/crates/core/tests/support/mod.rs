//! A minimal stand-in for the model-serving shim: byte tokenizer, uniform
//! next-token distribution over 256 symbols.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

#[derive(Default)]
pub struct ShimState {
    pub max_input: usize,
    /// Actual limit enforced by `/logprobs`; 0 means `max_input`.
    pub hard_limit: AtomicUsize,
    pub bos_id: Option<u32>,
    /// Answer this many requests with 503 before behaving.
    pub fail_first: AtomicUsize,
    pub requests: AtomicUsize,
    pub logprob_calls: AtomicUsize,
    in_flight: AtomicUsize,
    pub peak_in_flight: AtomicUsize,
    pub delay_ms: u64,
}

pub struct MockShim {
    pub url: String,
    pub state: Arc<ShimState>,
}

pub fn spawn(max_input: usize, bos_id: Option<u32>, fail_first: usize, delay_ms: u64) -> MockShim {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    let state = Arc::new(ShimState {
        max_input,
        bos_id,
        fail_first: AtomicUsize::new(fail_first),
        delay_ms,
        ..Default::default()
    });
    let s = state.clone();
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let s = s.clone();
            thread::spawn(move || handle(stream, &s));
        }
    });
    MockShim { url, state }
}

fn handle(mut stream: TcpStream, state: &ShimState) {
    let mut reader = BufReader::new(stream.try_clone().unwrap());
    let mut request_line = String::new();
    if reader.read_line(&mut request_line).unwrap_or(0) == 0 {
        return;
    }
    let mut content_length = 0;
    loop {
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                content_length = v.trim().parse().unwrap();
            }
        }
    }
    let mut body = vec![0; content_length];
    reader.read_exact(&mut body).unwrap();

    state.requests.fetch_add(1, Ordering::SeqCst);
    let now = state.in_flight.fetch_add(1, Ordering::SeqCst) + 1;
    state.peak_in_flight.fetch_max(now, Ordering::SeqCst);
    if state.delay_ms > 0 {
        thread::sleep(Duration::from_millis(state.delay_ms));
    }
    let (status, reply) = route(&request_line, &body, state);
    state.in_flight.fetch_sub(1, Ordering::SeqCst);

    let text = format!(
        "HTTP/1.1 {status}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
        reply.len()
    );
    let _ = stream.write_all(text.as_bytes());
}

fn route(request_line: &str, body: &[u8], state: &ShimState) -> (&'static str, String) {
    if state
        .fail_first
        .fetch_update(Ordering::SeqCst, Ordering::SeqCst, |n| n.checked_sub(1))
        .is_ok()
    {
        return ("503 Service Unavailable", "{\"error\":\"warming up\"}".into());
    }
    let path = request_line.split_whitespace().nth(1).unwrap_or("");
    let json: serde_json::Value = serde_json::from_slice(body).unwrap_or(serde_json::Value::Null);
    match path {
        "/info" => {
            let mut info = serde_json::json!({"model_id": "mock/uniform", "max_input": state.max_input, "vocab_size": 256});
            if let Some(b) = state.bos_id {
                info["bos_id"] = b.into();
            }
            ("200 OK", info.to_string())
        }
        "/tokenize" => {
            let text = json["text"].as_str().unwrap_or("");
            let ids: Vec<u32> = text.bytes().map(u32::from).collect();
            ("200 OK", serde_json::json!({ "ids": ids }).to_string())
        }
        "/logprobs" => {
            state.logprob_calls.fetch_add(1, Ordering::SeqCst);
            let n = json["ids"].as_array().map_or(0, Vec::len);
            let limit = match state.hard_limit.load(Ordering::SeqCst) {
                0 => state.max_input,
                l => l,
            };
            if n < 2 || n > limit {
                return ("400 Bad Request", format!("{{\"error\":\"bad length {n}\"}}"));
            }
            let lp = vec![-(256f64.ln()); n - 1];
            ("200 OK", serde_json::json!({ "logprobs": lp }).to_string())
        }
        _ => ("404 Not Found", "{}".into()),
    }
}
