//! Live HTTP provider with one adapter per vendor dialect.

use std::sync::Arc;
use std::time::Duration;

use serde_json::{json, Value};
use url::Url;

use super::retry::{retry_call, RateLimiter, RetryPolicy, Sleeper, ThreadSleeper};
use super::{ChatProvider, ChatRequest, ChatResponse, FinishReason, ProviderError, ProviderErrorKind};

/// Environment variable holding the API credential.
pub const API_KEY_ENV: &str = "MALEA_API_KEY";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dialect {
    /// `models/{model}:generateContent` with `contents`/`parts`.
    Gemini,
    /// `chat/completions` with a `messages` array.
    OpenAiCompatible,
}

impl Dialect {
    pub fn for_endpoint(endpoint: &Url) -> Self {
        match endpoint.host_str() {
            Some(h) if h.ends_with("generativelanguage.googleapis.com") => Dialect::Gemini,
            _ => Dialect::OpenAiCompatible,
        }
    }

    pub fn url(self, endpoint: &Url, model: &str) -> String {
        let base = endpoint.as_str().trim_end_matches('/');
        match self {
            Dialect::Gemini => format!("{base}/models/{model}:generateContent"),
            Dialect::OpenAiCompatible => format!("{base}/chat/completions"),
        }
    }

    pub fn body(self, request: &ChatRequest) -> Value {
        match self {
            Dialect::Gemini => gemini_body(request),
            Dialect::OpenAiCompatible => openai_body(request),
        }
    }

    pub fn parse(self, body: &Value) -> Result<ChatResponse, ProviderError> {
        match self {
            Dialect::Gemini => parse_gemini(body),
            Dialect::OpenAiCompatible => parse_openai(body),
        }
    }
}

fn gemini_body(request: &ChatRequest) -> Value {
    // Consecutive turns from the same side share one content entry.
    let mut contents: Vec<Value> = Vec::new();
    for (role, content) in &request.history {
        let role = if role == "assistant" { "model" } else { "user" };
        let part = json!({ "text": content });
        match contents.last_mut() {
            Some(last) if last["role"] == role => {
                last["parts"].as_array_mut().expect("parts array").push(part)
            }
            _ => contents.push(json!({ "role": role, "parts": [part] })),
        }
    }
    let mut generation = serde_json::Map::new();
    if let Some(t) = request.temperature {
        generation.insert("temperature".into(), json!(t));
    }
    if let Some(s) = request.seed {
        generation.insert("seed".into(), json!(s));
    }
    let mut body = json!({ "contents": contents, "generationConfig": generation });
    if !request.system_prompt.is_empty() {
        body["systemInstruction"] = json!({ "parts": [{ "text": request.system_prompt }] });
    }
    body
}

fn openai_body(request: &ChatRequest) -> Value {
    let mut messages = Vec::new();
    if !request.system_prompt.is_empty() {
        messages.push(json!({ "role": "system", "content": request.system_prompt }));
    }
    for (role, content) in &request.history {
        let role = if role == "assistant" { "assistant" } else { "user" };
        messages.push(json!({ "role": role, "content": content }));
    }
    let mut body = json!({ "model": request.model_name, "messages": messages });
    if let Some(t) = request.temperature {
        body["temperature"] = json!(t);
    }
    if let Some(s) = request.seed {
        body["seed"] = json!(s);
    }
    body
}

fn malformed(detail: impl Into<String>) -> ProviderError {
    ProviderError::new(ProviderErrorKind::Malformed, detail)
}

fn as_u32(v: &Value) -> u32 {
    v.as_u64().unwrap_or(0).min(u32::MAX as u64) as u32
}

fn parse_gemini(body: &Value) -> Result<ChatResponse, ProviderError> {
    if body["promptFeedback"]["blockReason"].is_string() {
        return Err(ProviderError::new(
            ProviderErrorKind::ContentFilter,
            body["promptFeedback"]["blockReason"].to_string(),
        ));
    }
    let candidate = body["candidates"]
        .get(0)
        .ok_or_else(|| malformed("response has no candidates"))?;
    let content: String = candidate["content"]["parts"]
        .as_array()
        .map(|parts| parts.iter().filter_map(|p| p["text"].as_str()).collect())
        .unwrap_or_default();
    let finish_reason = match candidate["finishReason"].as_str() {
        Some("STOP") | None => FinishReason::Stop,
        Some("MAX_TOKENS") => FinishReason::Length,
        Some("SAFETY" | "PROHIBITED_CONTENT" | "BLOCKLIST" | "SPII") => FinishReason::ContentFilter,
        Some(_) => FinishReason::Other,
    };
    ChatResponse {
        content,
        tokens_in: as_u32(&body["usageMetadata"]["promptTokenCount"]),
        tokens_out: as_u32(&body["usageMetadata"]["candidatesTokenCount"]),
        finish_reason,
    }
    .validate()
}

fn parse_openai(body: &Value) -> Result<ChatResponse, ProviderError> {
    let choice = body["choices"]
        .get(0)
        .ok_or_else(|| malformed("response has no choices"))?;
    let content = choice["message"]["content"]
        .as_str()
        .unwrap_or_default()
        .to_string();
    let finish_reason = match choice["finish_reason"].as_str() {
        Some("stop") | None => FinishReason::Stop,
        Some("length") => FinishReason::Length,
        Some("content_filter") => FinishReason::ContentFilter,
        Some(_) => FinishReason::Other,
    };
    ChatResponse {
        content,
        tokens_in: as_u32(&body["usage"]["prompt_tokens"]),
        tokens_out: as_u32(&body["usage"]["completion_tokens"]),
        finish_reason,
    }
    .validate()
}

/// Maps an HTTP status to the provider error taxonomy.
pub(crate) fn classify_status(status: u16, body: &str) -> ProviderError {
    let detail = format!("HTTP {status}: {}", body.chars().take(300).collect::<String>());
    let kind = match status {
        401 | 403 => ProviderErrorKind::Auth,
        429 => ProviderErrorKind::RateLimit,
        408 | 504 => ProviderErrorKind::Timeout,
        500..=599 => ProviderErrorKind::Transport,
        _ => ProviderErrorKind::Malformed,
    };
    ProviderError::new(kind, detail)
}

pub struct HttpProvider {
    client: reqwest::blocking::Client,
    endpoint: Url,
    dialect: Dialect,
    api_key: Option<String>,
    retry: RetryPolicy,
    sleeper: Arc<dyn Sleeper>,
    limiter: RateLimiter,
}

impl HttpProvider {
    pub fn new(endpoint: Url, api_key: Option<String>) -> Result<Self, ProviderError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(DEFAULT_TIMEOUT)
            .build()
            .map_err(|e| ProviderError::new(ProviderErrorKind::Transport, e.to_string()))?;
        Ok(Self {
            client,
            dialect: Dialect::for_endpoint(&endpoint),
            endpoint,
            api_key,
            retry: RetryPolicy::default(),
            sleeper: Arc::new(ThreadSleeper),
            limiter: RateLimiter::new(Duration::ZERO),
        })
    }

    /// Credentials come from [`API_KEY_ENV`] only.
    pub fn from_env(endpoint: Url) -> Result<Self, ProviderError> {
        let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
        Self::new(endpoint, key)
    }

    pub fn with_dialect(mut self, dialect: Dialect) -> Self {
        self.dialect = dialect;
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy, sleeper: Arc<dyn Sleeper>) -> Self {
        self.retry = retry;
        self.sleeper = sleeper;
        self
    }

    pub fn with_min_interval(mut self, interval: Duration) -> Self {
        self.limiter = RateLimiter::new(interval);
        self
    }

    pub fn dialect(&self) -> Dialect {
        self.dialect
    }

    fn attempt(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        self.limiter.acquire(self.sleeper.as_ref());
        let url = self.dialect.url(&self.endpoint, &request.model_name);
        let mut http = self.client.post(url).json(&self.dialect.body(request));
        if let Some(key) = &self.api_key {
            http = match self.dialect {
                Dialect::Gemini => http.header("x-goog-api-key", key),
                Dialect::OpenAiCompatible => http.bearer_auth(key),
            };
        }
        let response = http.send().map_err(|e| {
            let kind = if e.is_timeout() {
                ProviderErrorKind::Timeout
            } else {
                ProviderErrorKind::Transport
            };
            ProviderError::new(kind, e.to_string())
        })?;
        let status = response.status().as_u16();
        let text = response
            .text()
            .map_err(|e| ProviderError::new(ProviderErrorKind::Transport, e.to_string()))?;
        if !(200..300).contains(&status) {
            return Err(classify_status(status, &text));
        }
        let body: Value = serde_json::from_str(&text).map_err(|e| malformed(e.to_string()))?;
        self.dialect.parse(&body)
    }
}

impl ChatProvider for HttpProvider {
    fn complete(&self, request: &ChatRequest) -> Result<ChatResponse, ProviderError> {
        request.validate()?;
        retry_call(&self.retry, self.sleeper.as_ref(), |_| self.attempt(request))
    }

    fn mode(&self) -> &'static str {
        "live"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::provider::retry::tests::RecordingSleeper;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    fn request() -> ChatRequest {
        ChatRequest {
            system_prompt: "You are a tester.".into(),
            history: vec![
                ("user".into(), "Controller:\nGo".into()),
                ("assistant".into(), "Draft".into()),
            ],
            temperature: Some(0.2),
            model_name: "gemini-1.5-flash".into(),
            seed: Some(3),
        }
    }

    #[test]
    fn dialect_detection() {
        let g = Url::parse("https://generativelanguage.googleapis.com/v1beta").unwrap();
        assert_eq!(Dialect::for_endpoint(&g), Dialect::Gemini);
        assert_eq!(
            Dialect::Gemini.url(&g, "gemini-1.5-flash"),
            "https://generativelanguage.googleapis.com/v1beta/models/gemini-1.5-flash:generateContent"
        );
        let o = Url::parse("http://localhost:8080/v1/").unwrap();
        assert_eq!(Dialect::for_endpoint(&o), Dialect::OpenAiCompatible);
        assert_eq!(Dialect::OpenAiCompatible.url(&o, "x"), "http://localhost:8080/v1/chat/completions");
    }

    #[test]
    fn gemini_request_shape() {
        let body = Dialect::Gemini.body(&request());
        assert_eq!(body["systemInstruction"]["parts"][0]["text"], "You are a tester.");
        assert_eq!(body["contents"][1]["role"], "model");
        assert_eq!(body["generationConfig"]["temperature"], 0.2);
        assert_eq!(body["generationConfig"]["seed"], 3);
    }

    #[test]
    fn gemini_merges_same_side_turns() {
        let mut r = request();
        r.history.insert(1, ("user".into(), "Requirements Engineer:\nD0".into()));
        let body = Dialect::Gemini.body(&r);
        let contents = body["contents"].as_array().unwrap();
        assert_eq!(contents.len(), 2);
        assert_eq!(contents[0]["parts"].as_array().unwrap().len(), 2);
        assert_eq!(contents[1]["role"], "model");
    }

    #[test]
    fn openai_request_shape() {
        let mut r = request();
        r.temperature = None;
        let body = Dialect::OpenAiCompatible.body(&r);
        assert_eq!(body["messages"][0]["role"], "system");
        assert_eq!(body["messages"][2]["role"], "assistant");
        assert!(body.get("temperature").is_none());
    }

    #[test]
    fn parses_gemini_response() {
        let body = json!({
            "candidates": [{ "content": { "parts": [{ "text": "Hello" }, { "text": " there" }] }, "finishReason": "STOP" }],
            "usageMetadata": { "promptTokenCount": 12, "candidatesTokenCount": 3 }
        });
        let r = Dialect::Gemini.parse(&body).unwrap();
        assert_eq!(r.content, "Hello there");
        assert_eq!((r.tokens_in, r.tokens_out), (12, 3));
        let blocked = json!({ "candidates": [{ "content": { "parts": [] }, "finishReason": "SAFETY" }] });
        assert_eq!(
            Dialect::Gemini.parse(&blocked).unwrap_err().kind,
            ProviderErrorKind::ContentFilter
        );
    }

    #[test]
    fn parses_openai_response() {
        let body = json!({
            "choices": [{ "message": { "content": "Hi" }, "finish_reason": "length" }],
            "usage": { "prompt_tokens": 5, "completion_tokens": 1 }
        });
        let r = Dialect::OpenAiCompatible.parse(&body).unwrap();
        assert_eq!(r.finish_reason, FinishReason::Length);
        assert_eq!(
            Dialect::OpenAiCompatible.parse(&json!({})).unwrap_err().kind,
            ProviderErrorKind::Malformed
        );
    }

    #[test]
    fn status_classification() {
        assert_eq!(classify_status(401, "").kind, ProviderErrorKind::Auth);
        assert_eq!(classify_status(429, "").kind, ProviderErrorKind::RateLimit);
        assert_eq!(classify_status(504, "").kind, ProviderErrorKind::Timeout);
        assert_eq!(classify_status(503, "").kind, ProviderErrorKind::Transport);
        assert_eq!(classify_status(400, "").kind, ProviderErrorKind::Malformed);
    }

    #[test]
    fn unreachable_endpoint_exhausts_retries() {
        // Bind then drop to get a port nobody listens on.
        let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
        let url = Url::parse(&format!("http://127.0.0.1:{port}/v1")).unwrap();
        let sleeper = Arc::new(RecordingSleeper::default());
        let provider = HttpProvider::new(url, None)
            .unwrap()
            .with_retry(RetryPolicy::default(), sleeper.clone());
        let err = provider.complete(&request()).unwrap_err();
        assert_eq!(err.kind, ProviderErrorKind::Transport);
        let waits = sleeper.0.lock().unwrap();
        assert_eq!(waits.len(), 4);
        assert_eq!(waits.iter().sum::<Duration>(), Duration::from_secs(15));
    }

    fn serve(responses: Vec<(u16, String)>) -> (Url, std::thread::JoinHandle<Vec<String>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = Url::parse(&format!("http://{}/v1", listener.local_addr().unwrap())).unwrap();
        let handle = std::thread::spawn(move || {
            let mut bodies = Vec::new();
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0usize;
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                bodies.push(String::from_utf8(buf).unwrap());
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
            bodies
        });
        (url, handle)
    }

    #[test]
    fn retries_server_error_then_succeeds() {
        let ok = json!({ "choices": [{ "message": { "content": "Done" }, "finish_reason": "stop" }] });
        let (url, handle) = serve(vec![(503, "{}".into()), (200, ok.to_string())]);
        let sleeper = Arc::new(RecordingSleeper::default());
        let provider = HttpProvider::new(url, Some("k".into()))
            .unwrap()
            .with_retry(RetryPolicy::default(), sleeper.clone());
        let r = provider.complete(&request()).unwrap();
        assert_eq!(r.content, "Done");
        assert_eq!(*sleeper.0.lock().unwrap(), vec![Duration::from_secs(1)]);
        let bodies = handle.join().unwrap();
        let sent: Value = serde_json::from_str(&bodies[1]).unwrap();
        assert_eq!(sent["model"], "gemini-1.5-flash");
    }

    #[test]
    fn auth_failure_not_retried() {
        let (url, handle) = serve(vec![(401, "{\"error\":\"bad key\"}".into())]);
        let sleeper = Arc::new(RecordingSleeper::default());
        let provider = HttpProvider::new(url, Some("k".into()))
            .unwrap()
            .with_retry(RetryPolicy::default(), sleeper.clone());
        assert_eq!(provider.complete(&request()).unwrap_err().kind, ProviderErrorKind::Auth);
        assert!(sleeper.0.lock().unwrap().is_empty());
        handle.join().unwrap();
    }
}
