//! Uniform chat-completion access: a live HTTP client, a scripted provider
//! for tests, and cassette-based record/replay.

mod canonical;
mod cassette;
mod http;
mod retry;
mod scripted;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use canonical::{canonical_request, canonicalize_json, hash_canonical, request_hash};
pub use cassette::{Cassette, CassetteError, CassetteRecord, RecordingProvider, ReplayProvider};
pub use http::{Dialect, HttpProvider, API_KEY_ENV, DEFAULT_TIMEOUT};
pub use retry::{retry_call, RateLimiter, RetryPolicy, Sleeper, ThreadSleeper};
pub use scripted::ScriptedProvider;

/// One completion request. History entries are `(role label, content)`
/// pairs where the label is `user` or `assistant`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub system_prompt: String,
    pub history: Vec<(String, String)>,
    /// `None` leaves the vendor default in place.
    pub temperature: Option<f64>,
    pub model_name: String,
    pub seed: Option<i64>,
}

impl ChatRequest {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if self.history.is_empty() {
            return Err(ProviderError::new(ProviderErrorKind::Malformed, "request history is empty"));
        }
        if let Some(t) = self.temperature {
            if !t.is_finite() || !(0.0..=2.0).contains(&t) {
                return Err(ProviderError::new(
                    ProviderErrorKind::Malformed,
                    format!("temperature {t} outside [0, 2]"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinishReason {
    Stop,
    Length,
    ContentFilter,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    #[serde(default)]
    pub tokens_in: u32,
    #[serde(default)]
    pub tokens_out: u32,
    pub finish_reason: FinishReason,
}

impl ChatResponse {
    pub fn stop(content: impl Into<String>) -> Self {
        Self {
            content: content.into(),
            tokens_in: 0,
            tokens_out: 0,
            finish_reason: FinishReason::Stop,
        }
    }

    pub fn validate(self) -> Result<Self, ProviderError> {
        match self.finish_reason {
            FinishReason::Stop if self.content.trim().is_empty() => Err(ProviderError::new(
                ProviderErrorKind::Malformed,
                "empty completion",
            )),
            FinishReason::ContentFilter => Err(ProviderError::new(
                ProviderErrorKind::ContentFilter,
                "completion blocked by content filter",
            )),
            _ if self.content.trim().is_empty() => Err(ProviderError::new(
                ProviderErrorKind::Malformed,
                format!("empty completion (finish reason {:?})", self.finish_reason),
            )),
            _ => Ok(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderErrorKind {
    Auth,
    RateLimit,
    Timeout,
    Transport,
    ContentFilter,
    ReplayMiss,
    Malformed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProviderError {
    pub kind: ProviderErrorKind,
    pub detail: String,
}

impl ProviderError {
    pub fn new(kind: ProviderErrorKind, detail: impl Into<String>) -> Self {
        Self {
            kind,
            detail: detail.into(),
        }
    }

    /// Rate limits, timeouts and transport failures are worth another try.
    pub fn retryable(&self) -> bool {
        matches!(
            self.kind,
            ProviderErrorKind::RateLimit | ProviderErrorKind::Timeout | ProviderErrorKind::Transport
        )
    }
}

impl fmt::Display for ProviderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.kind, self.detail)
    }
}

impl std::error::Error for ProviderError {}

/// Anything that can answer a chat request.
pub trait ChatProvider: Send + Sync {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError>;

    /// Short label recorded in session manifests.
    fn mode(&self) -> &'static str;
}

impl<P: ChatProvider + ?Sized> ChatProvider for &P {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).complete(request)
    }

    fn mode(&self) -> &'static str {
        (**self).mode()
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for Box<P> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).complete(request)
    }

    fn mode(&self) -> &'static str {
        (**self).mode()
    }
}

impl<P: ChatProvider + ?Sized> ChatProvider for Arc<P> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        (**self).complete(request)
    }

    fn mode(&self) -> &'static str {
        (**self).mode()
    }
}
