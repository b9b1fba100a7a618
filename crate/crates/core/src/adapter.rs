//! Sending prompts to a chat-completions endpoint, or replaying stored
//! responses. Only [`run_batch`] touches the network.

use crate::prompts::PromptRecord;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdapterError {
    #[error("invalid endpoint configuration: {0}")]
    Config(String),
    #[error("environment variable {0} holding the endpoint token is not set")]
    MissingToken(String),
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: response for unknown prompt {prompt_id}")]
    UnknownPrompt { line: usize, prompt_id: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles per further attempt.
    pub backoff_base_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 5,
            backoff_base_ms: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    /// Full URL of the chat-completions route.
    pub base_url: String,
    pub model_name: String,
    /// Environment variable holding the bearer token; `None` sends no
    /// `Authorization` header.
    pub auth_token_env: Option<String>,
    pub max_in_flight: usize,
    pub batch_size: usize,
    pub timeout_secs: u64,
    pub retry: RetryPolicy,
    pub max_tokens: Option<u32>,
}

impl EndpointConfig {
    pub fn new(base_url: impl Into<String>, model_name: impl Into<String>) -> EndpointConfig {
        EndpointConfig {
            base_url: base_url.into(),
            model_name: model_name.into(),
            auth_token_env: None,
            max_in_flight: 4,
            batch_size: 20,
            timeout_secs: 120,
            retry: RetryPolicy::default(),
            max_tokens: None,
        }
    }

    pub fn validate(&self) -> Result<(), AdapterError> {
        if self.batch_size == 0 {
            return Err(AdapterError::Config("batch_size must be at least 1".into()));
        }
        if self.max_in_flight == 0 {
            return Err(AdapterError::Config("max_in_flight must be at least 1".into()));
        }
        if self.retry.max_attempts == 0 {
            return Err(AdapterError::Config("retry.max_attempts must be at least 1".into()));
        }
        if !(self.base_url.starts_with("http://") || self.base_url.starts_with("https://")) {
            return Err(AdapterError::Config(format!("base_url `{}` is not an http(s) URL", self.base_url)));
        }
        if self.model_name.is_empty() {
            return Err(AdapterError::Config("model_name is empty".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawResponse {
    pub prompt_id: String,
    pub text: String,
    pub latency_ms: u64,
    pub attempt_count: u32,
    /// Set when every attempt failed; `text` is then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

enum Failure {
    Transient(String),
    Permanent(String),
}

fn request_once(agent: &ureq::Agent, cfg: &EndpointConfig, token: Option<&str>, prompt: &str) -> Result<String, Failure> {
    let mut body = json!({
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": 0,
    });
    if let Some(m) = cfg.max_tokens {
        body["max_tokens"] = json!(m);
    }
    let mut req = agent.post(&cfg.base_url).header("Content-Type", "application/json");
    if let Some(t) = token {
        req = req.header("Authorization", &format!("Bearer {t}"));
    }
    let mut resp = match req.send_json(&body) {
        Ok(r) => r,
        Err(e) => return Err(Failure::Transient(e.to_string())),
    };
    let status = resp.status().as_u16();
    if status == 429 || status >= 500 {
        return Err(Failure::Transient(format!("HTTP {status}")));
    }
    if status >= 400 {
        let detail = resp.body_mut().read_to_string().unwrap_or_default();
        return Err(Failure::Permanent(format!("HTTP {status}: {}", detail.trim())));
    }
    let value: serde_json::Value = resp
        .body_mut()
        .read_json()
        .map_err(|e| Failure::Permanent(format!("unreadable completion body: {e}")))?;
    let content = &value["choices"][0]["message"]["content"];
    Ok(content.as_str().unwrap_or_default().to_string())
}

fn request_with_retry(agent: &ureq::Agent, cfg: &EndpointConfig, token: Option<&str>, p: &PromptRecord) -> RawResponse {
    let start = Instant::now();
    let mut attempt = 0;
    let mut last_error = String::new();
    while attempt < cfg.retry.max_attempts {
        if attempt > 0 {
            let delay = cfg.retry.backoff_base_ms.saturating_mul(1 << (attempt - 1).min(16));
            std::thread::sleep(Duration::from_millis(delay));
        }
        attempt += 1;
        match request_once(agent, cfg, token, &p.text) {
            Ok(text) => {
                return RawResponse {
                    prompt_id: p.prompt_id.clone(),
                    text,
                    latency_ms: start.elapsed().as_millis() as u64,
                    attempt_count: attempt,
                    error: None,
                }
            }
            Err(Failure::Transient(e)) => {
                log::debug!("{}: attempt {attempt} failed: {e}", p.prompt_id);
                last_error = e;
            }
            Err(Failure::Permanent(e)) => {
                last_error = e;
                break;
            }
        }
    }
    log::warn!("{}: giving up after {attempt} attempt(s): {last_error}", p.prompt_id);
    RawResponse {
        prompt_id: p.prompt_id.clone(),
        text: String::new(),
        latency_ms: start.elapsed().as_millis() as u64,
        attempt_count: attempt,
        error: Some(last_error),
    }
}

/// One response per prompt, sorted by prompt id. At most `max_in_flight`
/// requests are outstanding; failures are recorded, not raised.
pub fn run_batch(prompts: &[PromptRecord], cfg: &EndpointConfig) -> Result<Vec<RawResponse>, AdapterError> {
    cfg.validate()?;
    let token = match &cfg.auth_token_env {
        Some(var) => Some(std::env::var(var).map_err(|_| AdapterError::MissingToken(var.clone()))?),
        None => None,
    };
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(cfg.timeout_secs)))
        .http_status_as_error(false)
        .build()
        .into();
    let mut out = Vec::with_capacity(prompts.len());
    for (b, batch) in prompts.chunks(cfg.batch_size).enumerate() {
        let next = AtomicUsize::new(0);
        let results = Mutex::new(Vec::with_capacity(batch.len()));
        std::thread::scope(|s| {
            for _ in 0..cfg.max_in_flight.min(batch.len()) {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(p) = batch.get(i) else { break };
                    let r = request_with_retry(&agent, cfg, token.as_deref(), p);
                    results.lock().expect("no poisoned workers").push(r);
                });
            }
        });
        out.extend(results.into_inner().expect("no poisoned workers"));
        log::info!("batch {} done ({}/{} prompts)", b + 1, out.len(), prompts.len());
    }
    out.sort_by(|a, b| a.prompt_id.cmp(&b.prompt_id));
    Ok(out)
}

#[derive(Deserialize)]
struct OfflineLine {
    prompt_id: Option<String>,
    #[serde(default)]
    text: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OfflineResponses {
    pub responses: Vec<RawResponse>,
    /// Prompt ids seen more than once; the last line wins.
    pub duplicates: Vec<String>,
}

/// Parses `{"prompt_id": ..., "text": ...}` lines. With `known` set, ids
/// outside it are rejected.
pub fn parse_offline(src: &str, known: Option<&HashSet<String>>) -> Result<OfflineResponses, AdapterError> {
    let mut by_id: BTreeMap<String, RawResponse> = BTreeMap::new();
    let mut duplicates = Vec::new();
    for (i, line) in src.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: OfflineLine = serde_json::from_str(line).map_err(|e| AdapterError::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let prompt_id = rec.prompt_id.ok_or_else(|| AdapterError::Malformed {
            line: line_no,
            message: "missing prompt_id".into(),
        })?;
        if known.is_some_and(|k| !k.contains(&prompt_id)) {
            return Err(AdapterError::UnknownPrompt { line: line_no, prompt_id });
        }
        let resp = RawResponse {
            prompt_id: prompt_id.clone(),
            text: rec.text.unwrap_or_default(),
            latency_ms: 0,
            attempt_count: 1,
            error: None,
        };
        if by_id.insert(prompt_id.clone(), resp).is_some() {
            log::warn!("line {line_no}: duplicate response for {prompt_id}; keeping the last one");
            duplicates.push(prompt_id);
        }
    }
    Ok(OfflineResponses {
        responses: by_id.into_values().collect(),
        duplicates,
    })
}

pub fn load_offline(path: &Path, known: Option<&HashSet<String>>) -> Result<OfflineResponses, AdapterError> {
    let src = std::fs::read_to_string(path).map_err(|source| AdapterError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_offline(&src, known)
}

/// Stored responses aligned to `prompts`: one per prompt, sorted by id, with
/// prompts absent from the file answered by an empty, annotated response.
pub fn replay_offline(prompts: &[PromptRecord], path: &Path) -> Result<Vec<RawResponse>, AdapterError> {
    let known: HashSet<String> = prompts.iter().map(|p| p.prompt_id.clone()).collect();
    let loaded = load_offline(path, Some(&known))?;
    let mut by_id: BTreeMap<String, RawResponse> = loaded.responses.into_iter().map(|r| (r.prompt_id.clone(), r)).collect();
    for id in &known {
        by_id.entry(id.clone()).or_insert_with(|| RawResponse {
            prompt_id: id.clone(),
            text: String::new(),
            latency_ms: 0,
            attempt_count: 0,
            error: Some("no stored response".into()),
        });
    }
    Ok(by_id.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offline_lines() {
        let src = "{\"prompt_id\":\"b\",\"text\":\"True\"}\n\n{\"prompt_id\":\"a\",\"text\":\"\"}\n{\"prompt_id\":\"b\",\"text\":\"False\"}\n";
        let r = parse_offline(src, None).unwrap();
        assert_eq!(r.responses.len(), 2);
        assert_eq!(r.responses[0].prompt_id, "a");
        assert_eq!(r.responses[1].text, "False");
        assert_eq!(r.duplicates, vec!["b".to_string()]);
    }

    #[test]
    fn offline_errors_carry_line_numbers() {
        match parse_offline("{\"prompt_id\":\"a\",\"text\":\"x\"}\n{\"text\":\"x\"}\n", None) {
            Err(AdapterError::Malformed { line: 2, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        let known: HashSet<String> = ["a".to_string()].into();
        assert!(matches!(
            parse_offline("{\"prompt_id\":\"z\",\"text\":\"x\"}", Some(&known)),
            Err(AdapterError::UnknownPrompt { line: 1, .. })
        ));
        assert!(matches!(parse_offline("not json", None), Err(AdapterError::Malformed { line: 1, .. })));
    }

    /// Serves one canned status per connection, then stops.
    fn stub_server(statuses: Vec<u16>) -> (String, std::thread::JoinHandle<usize>) {
        use std::io::{BufRead, BufReader, Read, Write};
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let handle = std::thread::spawn(move || {
            let mut served = 0;
            for status in statuses {
                let (stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut body = vec![0; len];
                reader.read_exact(&mut body).unwrap();
                let payload: serde_json::Value = serde_json::from_slice(&body).unwrap();
                assert_eq!(payload["temperature"], 0);
                let reply = if status == 200 {
                    r#"{"choices":[{"message":{"role":"assistant","content":"True"}}]}"#
                } else {
                    r#"{"error":"busy"}"#
                };
                let mut stream = stream;
                write!(
                    stream,
                    "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                    reply.len()
                )
                .unwrap();
                served += 1;
            }
            served
        });
        (url, handle)
    }

    fn prompt(id: &str) -> PromptRecord {
        use crate::prompts::{Expected, Mode, Task};
        PromptRecord {
            schema_version: 1,
            prompt_id: id.to_string(),
            instance_id: "i".into(),
            task: Task::Entailment,
            mode: Mode::ZeroShot,
            text: "Is this valid?".into(),
            twin_id: None,
            twin_role: None,
            expected: Expected { label: crate::Label::True, premises: vec![] },
            n_premises: 2,
            scheme: crate::logic::SchemeId::all().next().unwrap(),
            n_distractors: 0,
            negative_strategy: crate::instantiate::NegativeStrategy::None,
        }
    }

    #[test]
    fn retries_rate_limits_then_succeeds() {
        let (url, server) = stub_server(vec![429, 429, 200]);
        let mut cfg = EndpointConfig::new(url, "stub");
        cfg.retry.backoff_base_ms = 1;
        cfg.max_in_flight = 1;
        let out = run_batch(&[prompt("a")], &cfg).unwrap();
        assert_eq!(server.join().unwrap(), 3);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].attempt_count, 3);
        assert_eq!(out[0].text, "True");
        assert_eq!(out[0].error, None);
    }

    #[test]
    fn permanent_failure_is_recorded() {
        let (url, server) = stub_server(vec![503, 400]);
        let mut cfg = EndpointConfig::new(url, "stub");
        cfg.retry.backoff_base_ms = 1;
        let out = run_batch(&[prompt("a")], &cfg).unwrap();
        assert_eq!(server.join().unwrap(), 2);
        assert_eq!(out[0].attempt_count, 2);
        assert_eq!(out[0].text, "");
        assert!(out[0].error.as_deref().unwrap().contains("400"));
    }

    #[test]
    fn config_validation() {
        let mut c = EndpointConfig::new("http://localhost:1/v1/chat/completions", "m");
        assert!(c.validate().is_ok());
        c.batch_size = 0;
        assert!(matches!(c.validate(), Err(AdapterError::Config(_))));
        let mut c = EndpointConfig::new("localhost", "m");
        assert!(c.validate().is_err());
        c.base_url = "https://x".into();
        c.max_in_flight = 0;
        assert!(c.validate().is_err());
    }
}
