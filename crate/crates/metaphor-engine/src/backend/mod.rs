//! Chat-model backend abstraction.
//!
//! Every pipeline talks to models through [`ModelBackend`]: one request
//! carrying an optional system text, a user text, and inline base64
//! images; one reply carrying optional thinking plus the answer text.
//! Concrete implementations are an OpenAI-compatible HTTP provider and a
//! scriptable mock driven by a fixture file keyed on request digests.

mod http;
mod script;
pub mod template;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use http::HttpBackend;
pub use script::{ScriptFixture, ScriptedBackend};

/// An inline image attachment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImagePayload {
    pub mime: String,
    pub base64: String,
}

/// One chat call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system: Option<String>,
    pub user: String,
    #[serde(default)]
    pub images: Vec<ImagePayload>,
    pub temperature: f64,
}

impl ChatRequest {
    pub fn text(user: impl Into<String>, temperature: f64) -> Self {
        ChatRequest {
            system: None,
            user: user.into(),
            images: Vec::new(),
            temperature,
        }
    }
}

/// A backend reply.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatReply {
    #[serde(default)]
    pub thinking: Option<String>,
    pub text: String,
}

impl ChatReply {
    pub fn text_only(text: impl Into<String>) -> Self {
        ChatReply {
            thinking: None,
            text: text.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("transport: {0}")]
    Transport(String),

    #[error("http status {status}: {body}")]
    Http { status: u16, body: String },

    #[error("protocol: {0}")]
    Protocol(String),

    #[error("no reply scripted for request digest {0}")]
    Unscripted(String),

    #[error("missing API key environment variable {0}")]
    MissingApiKey(String),

    #[error("backend config: {0}")]
    Config(String),

    #[error("template: {0}")]
    Template(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl BackendError {
    /// Transient failures worth retrying with backoff.
    pub fn is_retryable(&self) -> bool {
        matches!(
            self,
            BackendError::Transport(_)
                | BackendError::Http {
                    status: 429 | 500..=599,
                    ..
                }
        )
    }
}

/// Abstract chat endpoint shared by every pipeline stage.
pub trait ModelBackend: Send + Sync {
    fn name(&self) -> &str;
    fn chat(&self, request: &ChatRequest) -> Result<ChatReply, BackendError>;
}

/// Canonical digest of a request, used as the scripted-mock fixture key.
pub fn request_digest(request: &ChatRequest) -> String {
    let mut hasher = Sha256::new();
    hasher.update(format!("temperature={:?}\n", request.temperature));
    hasher.update(format!(
        "system={}\n",
        request.system.as_deref().unwrap_or("")
    ));
    hasher.update(format!("user={}\n", request.user));
    hasher.update(format!("images={}\n", request.images.len()));
    for image in &request.images {
        hasher.update(hex::encode(Sha256::digest(image.base64.as_bytes())));
        hasher.update("\n");
    }
    hex::encode(hasher.finalize())
}

/// Bounded retry with exponential backoff for transient failures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay_ms: u64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 3,
            base_delay_ms: 250,
        }
    }
}

impl RetryPolicy {
    /// No waiting between attempts; used by tests.
    pub fn immediate(max_attempts: u32) -> Self {
        RetryPolicy {
            max_attempts,
            base_delay_ms: 0,
        }
    }
}

pub fn chat_with_retry(
    backend: &dyn ModelBackend,
    request: &ChatRequest,
    policy: &RetryPolicy,
) -> Result<ChatReply, BackendError> {
    let attempts = policy.max_attempts.max(1);
    let mut attempt = 0;
    loop {
        attempt += 1;
        match backend.chat(request) {
            Ok(reply) => return Ok(reply),
            Err(err) if err.is_retryable() && attempt < attempts => {
                let delay = policy.base_delay_ms.saturating_mul(1 << (attempt - 1).min(6));
                log::warn!(
                    "backend {} attempt {attempt}/{attempts} failed, retrying: {err}",
                    backend.name()
                );
                if delay > 0 {
                    std::thread::sleep(std::time::Duration::from_millis(delay));
                }
            }
            Err(err) => return Err(err),
        }
    }
}

/// Declarative backend selection, as it appears in the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: BackendKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default)]
    pub model: Option<String>,
    /// Name of the environment variable holding the API key.
    #[serde(default)]
    pub api_key_env: Option<String>,
    #[serde(default = "default_max_parallel")]
    pub max_parallel: usize,
    /// Fixture file for `kind = "mock"`.
    #[serde(default)]
    pub fixture: Option<PathBuf>,
}

fn default_max_parallel() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Openai,
    Mock,
}

/// Instantiate a backend from its spec.
pub fn make_backend(name: &str, spec: &BackendSpec) -> Result<Box<dyn ModelBackend>, BackendError> {
    match spec.kind {
        BackendKind::Openai => {
            let endpoint = spec
                .endpoint
                .as_deref()
                .ok_or_else(|| BackendError::Config(format!("backend {name}: endpoint missing")))?;
            let model = spec
                .model
                .as_deref()
                .ok_or_else(|| BackendError::Config(format!("backend {name}: model missing")))?;
            let key_var = spec.api_key_env.as_deref().ok_or_else(|| {
                BackendError::Config(format!("backend {name}: api_key_env missing"))
            })?;
            let api_key = std::env::var(key_var)
                .map_err(|_| BackendError::MissingApiKey(key_var.to_string()))?;
            Ok(Box::new(HttpBackend::new(name, endpoint, model, api_key)?))
        }
        BackendKind::Mock => {
            let fixture = spec.fixture.as_deref().ok_or_else(|| {
                BackendError::Config(format!("backend {name}: mock requires a fixture path"))
            })?;
            Ok(Box::new(ScriptedBackend::from_fixture_file(name, fixture)?))
        }
    }
}

/// Map `f` over `items` with at most `max_in_flight` worker threads,
/// preserving input order in the output.
pub fn parallel_map<T, R, F>(items: &[T], max_in_flight: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let workers = max_in_flight.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    let f = &f;
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                if tx.send((i, f(i, &items[i]))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });
    let mut slots: Vec<Option<R>> = std::iter::repeat_with(|| None).take(items.len()).collect();
    for (i, r) in rx {
        slots[i] = Some(r);
    }
    slots
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}
