//! Cassettes: line-delimited `{request_hash, request_canonical, response}`
//! records, written in request order and replayed by hash.

use std::collections::{HashMap, VecDeque};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use super::canonical::{canonical_request, hash_canonical};
use super::{ChatProvider, ChatRequest, ChatResponse, ProviderError, ProviderErrorKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CassetteRecord {
    pub request_hash: String,
    pub request_canonical: Value,
    pub response: ChatResponse,
}

#[derive(Debug, Error)]
pub enum CassetteError {
    #[error("cassette line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("cassette line {line}: hash does not match the canonical request")]
    HashMismatch { line: usize },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Cassette {
    pub records: Vec<CassetteRecord>,
}

impl Cassette {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self, CassetteError> {
        let mut records = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: CassetteRecord =
                serde_json::from_str(line).map_err(|e| CassetteError::Malformed {
                    line: idx + 1,
                    reason: e.to_string(),
                })?;
            if hash_canonical(&record.request_canonical) != record.request_hash {
                return Err(CassetteError::HashMismatch { line: idx + 1 });
            }
            records.push(record);
        }
        Ok(Self { records })
    }
}

/// Answers from a cassette without touching the network. Identical
/// requests recorded more than once replay in their recorded order; the
/// last one repeats after that.
#[derive(Debug)]
pub struct ReplayProvider {
    by_hash: Mutex<HashMap<String, VecDeque<ChatResponse>>>,
}

impl ReplayProvider {
    pub fn new(cassette: &Cassette) -> Self {
        let mut by_hash: HashMap<String, VecDeque<ChatResponse>> = HashMap::new();
        for r in &cassette.records {
            by_hash
                .entry(r.request_hash.clone())
                .or_default()
                .push_back(r.response.clone());
        }
        Self {
            by_hash: Mutex::new(by_hash),
        }
    }
}

impl ChatProvider for ReplayProvider {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let hash = hash_canonical(&canonical_request(request));
        let mut map = self.by_hash.lock().expect("poisoned");
        let queue = map.get_mut(&hash).ok_or_else(|| {
            ProviderError::new(
                ProviderErrorKind::ReplayMiss,
                format!("no recorded response for request {hash}"),
            )
        })?;
        let response = if queue.len() > 1 {
            queue.pop_front().expect("non-empty")
        } else {
            queue.front().cloned().expect("non-empty")
        };
        Ok(response)
    }

    fn mode(&self) -> &'static str {
        "replay"
    }
}

/// Wraps a provider and keeps every successful exchange for a cassette.
pub struct RecordingProvider<P> {
    inner: P,
    records: Mutex<Vec<CassetteRecord>>,
}

impl<P: ChatProvider> RecordingProvider<P> {
    pub fn new(inner: P) -> Self {
        Self {
            inner,
            records: Mutex::new(Vec::new()),
        }
    }

    pub fn cassette(&self) -> Cassette {
        Cassette {
            records: self.records.lock().expect("poisoned").clone(),
        }
    }

    pub fn into_inner(self) -> P {
        self.inner
    }
}

impl<P: ChatProvider> ChatProvider for RecordingProvider<P> {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        let response = self.inner.complete(request)?;
        let canonical = canonical_request(request);
        self.records.lock().expect("poisoned").push(CassetteRecord {
            request_hash: hash_canonical(&canonical),
            request_canonical: canonical,
            response: response.clone(),
        });
        Ok(response)
    }

    fn mode(&self) -> &'static str {
        self.inner.mode()
    }
}
