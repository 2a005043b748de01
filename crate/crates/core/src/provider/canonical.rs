//! Canonical request form and hashing for cassettes.
//!
//! The canonical form is compact JSON with object keys sorted, so two
//! serializations that differ only in key order hash identically.

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::ChatRequest;

pub fn canonical_request(request: &ChatRequest) -> Value {
    let history: Vec<Value> = request
        .history
        .iter()
        .map(|(role, content)| json!({ "role": role, "content": content }))
        .collect();
    json!({
        "model": request.model_name,
        "system": request.system_prompt,
        "history": history,
        "temperature": request.temperature,
        "seed": request.seed,
    })
}

/// Re-serializes arbitrary JSON text in canonical (sorted-key, compact) form.
pub fn canonicalize_json(text: &str) -> Result<String, serde_json::Error> {
    let value: Value = serde_json::from_str(text)?;
    Ok(value.to_string())
}

pub fn hash_canonical(value: &Value) -> String {
    hex::encode(Sha256::digest(value.to_string().as_bytes()))
}

pub fn request_hash(request: &ChatRequest) -> String {
    hash_canonical(&canonical_request(request))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> ChatRequest {
        ChatRequest {
            system_prompt: "sys".into(),
            history: vec![("user".into(), "hello".into())],
            temperature: Some(0.2),
            model_name: "gemini-1.5-flash".into(),
            seed: Some(7),
        }
    }

    #[test]
    fn key_order_does_not_matter() {
        let a = r#"{"model":"m","seed":null,"system":"s","temperature":0.2,"history":[{"role":"user","content":"c"}]}"#;
        let b = r#"{"history":[{"content":"c","role":"user"}],"temperature":0.2,"system":"s","seed":null,"model":"m"}"#;
        assert_eq!(canonicalize_json(a).unwrap(), canonicalize_json(b).unwrap());
        let va: Value = serde_json::from_str(a).unwrap();
        let vb: Value = serde_json::from_str(b).unwrap();
        assert_eq!(hash_canonical(&va), hash_canonical(&vb));
    }

    #[test]
    fn sensitive_to_content_temperature_and_seed() {
        let base = request_hash(&request());
        assert_eq!(base, request_hash(&request()));
        let mut r = request();
        r.history[0].1 = "hello!".into();
        assert_ne!(request_hash(&r), base);
        let mut r = request();
        r.temperature = Some(0.3);
        assert_ne!(request_hash(&r), base);
        let mut r = request();
        r.seed = Some(8);
        assert_ne!(request_hash(&r), base);
        let mut r = request();
        r.seed = None;
        assert_ne!(request_hash(&r), base);
    }

    #[test]
    fn canonical_text_is_sorted() {
        let text = canonical_request(&request()).to_string();
        let h = text.find("\"history\"").unwrap();
        let m = text.find("\"model\"").unwrap();
        let s = text.find("\"seed\"").unwrap();
        assert!(h < m && m < s);
    }
}
