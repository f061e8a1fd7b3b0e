//! Model gateway: prompt roles, decoding defaults, backends, retry and
//! response caching.
//!
//! Every model interaction in the pipeline goes through [`Gateway::ask`] with
//! a [`PromptRole`]; the gateway renders the role's template, applies the
//! role's decoding parameters, consults the disk cache, and retries transient
//! backend failures with exponential backoff. Permanent failures (protocol
//! errors, scripted-run key misses) surface immediately.

pub mod cache;
pub mod prompts;
pub mod remote;
pub mod stub;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::DiskCache;
pub use prompts::{render_prompt, vars, PromptVars, RenderedPrompt};
pub use remote::{RemoteBackend, RemoteConfig};
pub use stub::ScriptedBackend;

/// The distinct jobs the pipeline asks a model to do. Each role has its own
/// prompt template and decoding defaults.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PromptRole {
    ProposeAxioms,
    SynthesizeAxiom,
    ProposeStrategy,
    GenerateProof,
    AnnotateSubpropositions,
    AnalyzeFailures,
    TranslateTptp,
    OptimizeContext,
}

impl PromptRole {
    pub const ALL: [PromptRole; 8] = [
        PromptRole::ProposeAxioms,
        PromptRole::SynthesizeAxiom,
        PromptRole::ProposeStrategy,
        PromptRole::GenerateProof,
        PromptRole::AnnotateSubpropositions,
        PromptRole::AnalyzeFailures,
        PromptRole::TranslateTptp,
        PromptRole::OptimizeContext,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PromptRole::ProposeAxioms => "ProposeAxioms",
            PromptRole::SynthesizeAxiom => "SynthesizeAxiom",
            PromptRole::ProposeStrategy => "ProposeStrategy",
            PromptRole::GenerateProof => "GenerateProof",
            PromptRole::AnnotateSubpropositions => "AnnotateSubpropositions",
            PromptRole::AnalyzeFailures => "AnalyzeFailures",
            PromptRole::TranslateTptp => "TranslateTptp",
            PromptRole::OptimizeContext => "OptimizeContext",
        }
    }
}

impl fmt::Display for PromptRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PromptRole {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PromptRole::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| format!("unknown prompt role `{s}`"))
    }
}

/// Sampling parameters for one request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoding {
    pub temperature: f64,
    pub top_p: f64,
    pub max_tokens: u32,
}

impl Decoding {
    /// Role defaults: exploration roles sample at 0.7, roles that must stay
    /// faithful to their input decode greedily.
    pub fn for_role(role: PromptRole) -> Decoding {
        let temperature = match role {
            PromptRole::ProposeAxioms
            | PromptRole::SynthesizeAxiom
            | PromptRole::ProposeStrategy
            | PromptRole::GenerateProof => 0.7,
            PromptRole::AnnotateSubpropositions
            | PromptRole::AnalyzeFailures
            | PromptRole::TranslateTptp
            | PromptRole::OptimizeContext => 0.0,
        };
        Decoding {
            temperature,
            top_p: 0.95,
            max_tokens: 4096,
        }
    }
}

/// One fully-specified model call. Serialization order is fixed, so the
/// serialized form doubles as the cache key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRequest {
    pub role: PromptRole,
    pub system: String,
    pub user: String,
    pub decoding: Decoding,
    /// Distinguishes deliberate resamples of an otherwise identical request
    /// (independent baseline attempts) so the cache cannot collapse them.
    /// Backends ignore it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub salt: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelResponse {
    pub text: String,
    #[serde(default)]
    pub usage: Option<TokenUsage>,
    #[serde(default)]
    pub model: Option<String>,
    /// True when the response came from the disk cache rather than the
    /// backend. Never persisted.
    #[serde(default, skip_serializing)]
    pub cached: bool,
}

impl ModelResponse {
    pub fn from_text(text: impl Into<String>) -> ModelResponse {
        ModelResponse {
            text: text.into(),
            usage: None,
            model: None,
            cached: false,
        }
    }
}

/// Backend failures, split by whether a retry can possibly help.
#[derive(Debug, Error)]
pub enum BackendError {
    /// Network-level failure or an overloaded/5xx server; retryable.
    #[error("transient: {0}")]
    Transient(String),
    /// The server answered but the answer is unusable; retrying sends the
    /// identical request, so don't.
    #[error("{0}")]
    Permanent(String),
}

impl BackendError {
    pub fn is_transient(&self) -> bool {
        matches!(self, BackendError::Transient(_))
    }
}

pub trait Backend: Send + Sync {
    /// Stable identifier used in logs and error messages.
    fn id(&self) -> &str;

    fn complete(&self, request: &ModelRequest) -> Result<ModelResponse, BackendError>;
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("backend `{backend}` failed after {attempts} attempt(s): {source}")]
    Backend {
        backend: String,
        attempts: u32,
        source: BackendError,
    },
    #[error("template for {role}: variable `{variable}` was not supplied")]
    MissingVariable { role: PromptRole, variable: String },
    #[error("template for {role}: variable `{variable}` is empty")]
    EmptyVariable { role: PromptRole, variable: String },
    #[error("response cache: {0}")]
    Cache(#[from] std::io::Error),
}

/// Retry policy for transient backend failures. Delay doubles per attempt.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_retries: 3,
            base_delay_ms: 500,
        }
    }
}

/// A fenced code block pulled out of a model reply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedCode {
    pub code: String,
    /// True when no fence was found and the whole reply was taken as-is.
    pub unfenced: bool,
}

/// Pulls the proof source out of a model reply: the first ```lean fence wins,
/// then the first fence of any other label, and a reply with no fences at all
/// is taken verbatim (flagged so callers can log it).
pub fn extract_code_block(text: &str) -> ExtractedCode {
    fn fence_body(text: &str, want_lean: bool) -> Option<String> {
        let mut body: Option<Vec<&str>> = None;
        for line in text.lines() {
            match &mut body {
                None => {
                    let trimmed = line.trim_start();
                    if let Some(label) = trimmed.strip_prefix("```") {
                        let label = label.trim();
                        if want_lean == (label == "lean" || label.starts_with("lean ")) {
                            body = Some(Vec::new());
                        }
                    }
                }
                Some(lines) => {
                    if line.trim_start().starts_with("```") {
                        return Some(lines.join("\n"));
                    }
                    lines.push(line);
                }
            }
        }
        // Unterminated fence: take everything after the opener.
        body.map(|lines| lines.join("\n"))
    }

    if let Some(code) = fence_body(text, true).or_else(|| fence_body(text, false)) {
        return ExtractedCode {
            code,
            unfenced: false,
        };
    }
    ExtractedCode {
        code: text.trim().to_string(),
        unfenced: true,
    }
}

/// Front door for all model calls: template rendering, per-role decoding,
/// caching, and retries behind one method.
pub struct Gateway {
    backend: Arc<dyn Backend>,
    cache: Option<DiskCache>,
    retry: RetryPolicy,
    decoding_overrides: BTreeMap<PromptRole, Decoding>,
}

impl Gateway {
    pub fn new(backend: Arc<dyn Backend>) -> Gateway {
        Gateway {
            backend,
            cache: None,
            retry: RetryPolicy::default(),
            decoding_overrides: BTreeMap::new(),
        }
    }

    pub fn with_cache(mut self, cache: DiskCache) -> Gateway {
        self.cache = Some(cache);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Gateway {
        self.retry = retry;
        self
    }

    pub fn with_decoding_overrides(mut self, overrides: BTreeMap<PromptRole, Decoding>) -> Gateway {
        self.decoding_overrides = overrides;
        self
    }

    pub fn backend_id(&self) -> &str {
        self.backend.id()
    }

    pub fn decoding_for(&self, role: PromptRole) -> Decoding {
        self.decoding_overrides
            .get(&role)
            .cloned()
            .unwrap_or_else(|| Decoding::for_role(role))
    }

    /// Renders the role's template over `vars` and runs the request.
    pub fn ask(&self, role: PromptRole, vars: &PromptVars) -> Result<ModelResponse, GatewayError> {
        self.ask_salted(role, vars, None)
    }

    /// [`Gateway::ask`] with a resampling salt (see [`ModelRequest::salt`]).
    pub fn ask_salted(
        &self,
        role: PromptRole,
        vars: &PromptVars,
        salt: Option<String>,
    ) -> Result<ModelResponse, GatewayError> {
        let rendered = render_prompt(role, vars)?;
        let request = ModelRequest {
            role,
            system: rendered.system,
            user: rendered.user,
            decoding: self.decoding_for(role),
            salt,
        };
        self.invoke(&request)
    }

    /// Runs a fully-built request: cache lookup, then the backend with
    /// retries on transient failures only.
    pub fn invoke(&self, request: &ModelRequest) -> Result<ModelResponse, GatewayError> {
        if let Some(cache) = &self.cache {
            if let Some(mut hit) = cache.get(request)? {
                hit.cached = true;
                return Ok(hit);
            }
        }

        let mut attempts = 0;
        let response = loop {
            attempts += 1;
            match self.backend.complete(request) {
                Ok(response) => break response,
                Err(err) if err.is_transient() && attempts <= self.retry.max_retries => {
                    let delay = self.retry.base_delay_ms << (attempts - 1).min(16);
                    std::thread::sleep(Duration::from_millis(delay));
                }
                Err(err) => {
                    return Err(GatewayError::Backend {
                        backend: self.backend.id().to_string(),
                        attempts,
                        source: err,
                    });
                }
            }
        };

        if let Some(cache) = &self.cache {
            cache.put(request, &response)?;
        }
        Ok(response)
    }
}
