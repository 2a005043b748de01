//! Provider that plays back a fixed queue of replies.

use std::collections::VecDeque;
use std::sync::Mutex;

use super::{ChatProvider, ChatRequest, ChatResponse, ProviderError, ProviderErrorKind};

/// Replies are handed out in order, one per call, whatever the request.
/// Running past the end is a `ReplayMiss`.
#[derive(Debug, Default)]
pub struct ScriptedProvider {
    queue: Mutex<VecDeque<Result<ChatResponse, ProviderError>>>,
    seen: Mutex<Vec<ChatRequest>>,
}

impl ScriptedProvider {
    pub fn new<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::from_results(replies.into_iter().map(|s| Ok(ChatResponse::stop(s))))
    }

    pub fn from_results<I>(replies: I) -> Self
    where
        I: IntoIterator<Item = Result<ChatResponse, ProviderError>>,
    {
        Self {
            queue: Mutex::new(replies.into_iter().collect()),
            seen: Mutex::new(Vec::new()),
        }
    }

    pub fn calls(&self) -> usize {
        self.seen.lock().expect("poisoned").len()
    }

    pub fn requests(&self) -> Vec<ChatRequest> {
        self.seen.lock().expect("poisoned").clone()
    }

    pub fn remaining(&self) -> usize {
        self.queue.lock().expect("poisoned").len()
    }
}

impl ChatProvider for ScriptedProvider {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        self.seen.lock().expect("poisoned").push(request.clone());
        match self.queue.lock().expect("poisoned").pop_front() {
            Some(reply) => reply.and_then(ChatResponse::validate),
            None => Err(ProviderError::new(
                ProviderErrorKind::ReplayMiss,
                "scripted provider has no replies left",
            )),
        }
    }

    fn mode(&self) -> &'static str {
        "scripted"
    }
}
