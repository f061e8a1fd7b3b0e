//! Chat-completion client for any OpenAI-compatible endpoint.
//!
//! Transport failures and overload responses (429, 5xx) are transient and
//! retried by the gateway; other HTTP errors and malformed bodies are
//! permanent because resending the same request cannot change them. A
//! counting gate caps how many requests are on the wire at once, so a large
//! parallel run cannot stampede the endpoint.

use std::sync::{Condvar, Mutex};

use serde::{Deserialize, Serialize};

use super::{Backend, BackendError, ModelRequest, ModelResponse, TokenUsage};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RemoteConfig {
    /// Full URL of the chat-completions route.
    pub endpoint: String,
    pub model: String,
    /// Environment variable holding the bearer token, if the endpoint needs
    /// one. The key itself never appears in config files.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
    /// Maximum requests in flight at once; further callers block.
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
}

fn default_timeout_secs() -> u64 {
    120
}

fn default_max_in_flight() -> usize {
    4
}

/// Counting gate: `acquire` blocks while `max_in_flight` slots are taken and
/// returns a guard that frees its slot on drop.
struct FlightGate {
    free: Mutex<usize>,
    freed: Condvar,
}

impl FlightGate {
    fn new(slots: usize) -> FlightGate {
        FlightGate {
            free: Mutex::new(slots),
            freed: Condvar::new(),
        }
    }

    fn acquire(&self) -> FlightSlot<'_> {
        let mut free = self.free.lock().unwrap();
        while *free == 0 {
            free = self.freed.wait(free).unwrap();
        }
        *free -= 1;
        FlightSlot { gate: self }
    }
}

struct FlightSlot<'a> {
    gate: &'a FlightGate,
}

impl Drop for FlightSlot<'_> {
    fn drop(&mut self) {
        *self.gate.free.lock().unwrap() += 1;
        self.gate.freed.notify_one();
    }
}

pub struct RemoteBackend {
    id: String,
    config: RemoteConfig,
    api_key: Option<String>,
    client: reqwest::blocking::Client,
    gate: FlightGate,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    top_p: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireChoiceMessage,
}

#[derive(Deserialize)]
struct WireChoiceMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct WireUsage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    usage: Option<WireUsage>,
    model: Option<String>,
}

impl RemoteBackend {
    pub fn new(id: impl Into<String>, config: RemoteConfig) -> Result<RemoteBackend, BackendError> {
        if config.max_in_flight == 0 {
            return Err(BackendError::Permanent(
                "max_in_flight must be at least 1".to_string(),
            ));
        }
        let api_key = match &config.api_key_env {
            Some(var) => Some(std::env::var(var).map_err(|_| {
                BackendError::Permanent(format!("environment variable `{var}` is not set"))
            })?),
            None => None,
        };
        let client = reqwest::blocking::Client::builder()
            .timeout(std::time::Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| BackendError::Permanent(format!("http client: {e}")))?;
        let gate = FlightGate::new(config.max_in_flight);
        Ok(RemoteBackend {
            id: id.into(),
            config,
            api_key,
            client,
            gate,
        })
    }
}

impl Backend for RemoteBackend {
    fn id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &ModelRequest) -> Result<ModelResponse, BackendError> {
        let _slot = self.gate.acquire();
        let mut messages = Vec::with_capacity(2);
        if !request.system.is_empty() {
            messages.push(WireMessage {
                role: "system",
                content: &request.system,
            });
        }
        messages.push(WireMessage {
            role: "user",
            content: &request.user,
        });
        let body = WireRequest {
            model: &self.config.model,
            messages,
            temperature: request.decoding.temperature,
            top_p: request.decoding.top_p,
            max_tokens: request.decoding.max_tokens,
        };

        let mut http = self.client.post(&self.config.endpoint).json(&body);
        if let Some(key) = &self.api_key {
            http = http.bearer_auth(key);
        }
        let response = http.send().map_err(|e| {
            // Connect/timeout/reset all land here; the request may never have
            // been seen, so it is always safe to retry.
            BackendError::Transient(format!("request to {}: {e}", self.config.endpoint))
        })?;

        let status = response.status();
        let text = response
            .text()
            .map_err(|e| BackendError::Transient(format!("reading response body: {e}")))?;
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(BackendError::Transient(format!(
                "{status}: {}",
                truncate(&text, 300)
            )));
        }
        if !status.is_success() {
            return Err(BackendError::Permanent(format!(
                "{status}: {}",
                truncate(&text, 300)
            )));
        }

        let wire: WireResponse = serde_json::from_str(&text).map_err(|e| {
            BackendError::Permanent(format!("malformed completion body: {e}"))
        })?;
        let content = wire
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| BackendError::Permanent("completion had no choices".to_string()))?;
        let usage = wire.usage.and_then(|u| {
            Some(TokenUsage {
                prompt_tokens: u.prompt_tokens?,
                completion_tokens: u.completion_tokens?,
            })
        });
        Ok(ModelResponse {
            text: content,
            usage,
            model: wire.model,
            cached: false,
        })
    }
}

fn truncate(text: &str, max: usize) -> &str {
    match text.char_indices().nth(max) {
        Some((i, _)) => &text[..i],
        None => text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gateway::{Decoding, PromptRole};
    use std::io::{Read, Write};
    use std::net::TcpListener;

    fn request() -> ModelRequest {
        ModelRequest {
            role: PromptRole::GenerateProof,
            system: "you prove things".into(),
            user: "prove True".into(),
            decoding: Decoding::for_role(PromptRole::GenerateProof),
            salt: None,
        }
    }

    /// Serves one canned HTTP response on a local port, returning the raw
    /// request bytes it saw.
    fn one_shot_server(body: &str) -> (String, std::thread::JoinHandle<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let body = body.to_string();
        let handle = std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut seen = Vec::new();
            let mut buf = [0u8; 4096];
            // Read headers, then the announced body length.
            let content_length = loop {
                let n = stream.read(&mut buf).unwrap();
                seen.extend_from_slice(&buf[..n]);
                let text = String::from_utf8_lossy(&seen).into_owned();
                if let Some(header_end) = text.find("\r\n\r\n") {
                    let length = text
                        .lines()
                        .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:")
                            .map(|v| v.trim().parse::<usize>().unwrap()))
                        .unwrap_or(0);
                    break (header_end + 4, length);
                }
            };
            while seen.len() < content_length.0 + content_length.1 {
                let n = stream.read(&mut buf).unwrap();
                seen.extend_from_slice(&buf[..n]);
            }
            let reply = format!(
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                body.len(),
                body
            );
            stream.write_all(reply.as_bytes()).unwrap();
            String::from_utf8_lossy(&seen).into_owned()
        });
        (format!("http://{addr}/v1/chat/completions"), handle)
    }

    #[test]
    fn completes_against_a_chat_endpoint() {
        let body = r#"{"choices":[{"message":{"content":"```lean\ntheorem t : True := trivial\n```"}}],"usage":{"prompt_tokens":12,"completion_tokens":9},"model":"test-model"}"#;
        let (endpoint, server) = one_shot_server(body);
        let backend = RemoteBackend::new(
            "remote-test",
            RemoteConfig {
                endpoint,
                model: "test-model".into(),
                api_key_env: None,
                timeout_secs: 5,
                max_in_flight: 4,
            },
        )
        .unwrap();

        let response = backend.complete(&request()).unwrap();
        assert!(response.text.contains("theorem t : True := trivial"));
        assert_eq!(
            response.usage,
            Some(TokenUsage {
                prompt_tokens: 12,
                completion_tokens: 9
            })
        );
        assert_eq!(response.model.as_deref(), Some("test-model"));

        let seen = server.join().unwrap();
        assert!(seen.contains("\"model\":\"test-model\""));
        assert!(seen.contains("you prove things"));
        assert!(seen.contains("\"temperature\":0.7"));
    }

    #[test]
    fn connection_refused_is_transient() {
        // Bind then drop to get a port nothing listens on.
        let port = {
            let l = TcpListener::bind("127.0.0.1:0").unwrap();
            l.local_addr().unwrap().port()
        };
        let backend = RemoteBackend::new(
            "remote-test",
            RemoteConfig {
                endpoint: format!("http://127.0.0.1:{port}/v1/chat/completions"),
                model: "m".into(),
                api_key_env: None,
                timeout_secs: 1,
                max_in_flight: 4,
            },
        )
        .unwrap();
        let err = backend.complete(&request()).unwrap_err();
        assert!(err.is_transient(), "{err}");
    }

    #[test]
    fn flight_gate_caps_peak_concurrency() {
        use std::sync::atomic::{AtomicUsize, Ordering};
        use std::sync::Arc;

        let gate = Arc::new(FlightGate::new(2));
        let current = Arc::new(AtomicUsize::new(0));
        let peak = Arc::new(AtomicUsize::new(0));
        let handles: Vec<_> = (0..8)
            .map(|_| {
                let (gate, current, peak) = (gate.clone(), current.clone(), peak.clone());
                std::thread::spawn(move || {
                    let _slot = gate.acquire();
                    let now = current.fetch_add(1, Ordering::SeqCst) + 1;
                    peak.fetch_max(now, Ordering::SeqCst);
                    std::thread::sleep(std::time::Duration::from_millis(10));
                    current.fetch_sub(1, Ordering::SeqCst);
                })
            })
            .collect();
        for handle in handles {
            handle.join().unwrap();
        }
        assert!(peak.load(Ordering::SeqCst) <= 2);
        assert_eq!(*gate.free.lock().unwrap(), 2);
    }

    #[test]
    fn zero_in_flight_cap_is_rejected_at_construction() {
        let err = RemoteBackend::new(
            "remote-test",
            RemoteConfig {
                endpoint: "http://127.0.0.1:1/".into(),
                model: "m".into(),
                api_key_env: None,
                timeout_secs: 1,
                max_in_flight: 0,
            },
        )
        .err()
        .unwrap();
        assert!(err.to_string().contains("max_in_flight"));
    }

    #[test]
    fn missing_api_key_env_is_reported_at_construction() {
        let err = match RemoteBackend::new(
            "remote-test",
            RemoteConfig {
                endpoint: "http://127.0.0.1:1/".into(),
                model: "m".into(),
                api_key_env: Some("DREAM_TEST_KEY_THAT_IS_NOT_SET".into()),
                timeout_secs: 1,
                max_in_flight: 4,
            },
        ) {
            Err(err) => err,
            Ok(_) => panic!("construction should fail without the key"),
        };
        assert!(err.to_string().contains("DREAM_TEST_KEY_THAT_IS_NOT_SET"));
    }
}
