use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use super::taxonomy::{default_taxonomy, validate_taxonomy, EthicsTheme};

pub const DEFAULT_ENDPOINT: &str = "https://generativelanguage.googleapis.com/v1beta";
pub const DEFAULT_MODEL: &str = "gemini-1.5-flash";

fn default_temperature() -> f64 {
    0.2
}

fn default_max_critique_cycles() -> u32 {
    2
}

fn default_min_stories() -> u32 {
    5
}

/// Everything that parameterises a session. Config file keys map onto
/// these fields one-to-one; credentials never live here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub provider_endpoint: Url,
    pub model_name: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<i64>,
    #[serde(default = "default_max_critique_cycles")]
    pub max_critique_cycles: u32,
    #[serde(default = "default_min_stories")]
    pub min_stories: u32,
    #[serde(default = "default_taxonomy")]
    pub themes: Vec<EthicsTheme>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            provider_endpoint: Url::parse(DEFAULT_ENDPOINT).expect("valid default endpoint"),
            model_name: DEFAULT_MODEL.to_string(),
            temperature: default_temperature(),
            seed: None,
            max_critique_cycles: default_max_critique_cycles(),
            min_stories: default_min_stories(),
            themes: default_taxonomy(),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("missing config key `{0}`")]
    MissingKey(String),
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("malformed config: {0}")]
    Parse(String),
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |key: &str, reason: &str| ConfigError::Invalid {
            key: key.to_string(),
            reason: reason.to_string(),
        };
        if self.model_name.trim().is_empty() {
            return Err(invalid("model_name", "must not be empty"));
        }
        if !self.temperature.is_finite() || !(0.0..=2.0).contains(&self.temperature) {
            return Err(invalid("temperature", "must lie in [0, 2]"));
        }
        if self.max_critique_cycles < 1 {
            return Err(invalid("max_critique_cycles", "must be at least 1"));
        }
        if self.min_stories < 1 {
            return Err(invalid("min_stories", "must be at least 1"));
        }
        validate_taxonomy(&self.themes).map_err(|e| invalid("themes", &e.to_string()))
    }

    /// Parses and validates a TOML config file.
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            match missing_field(&msg) {
                Some(key) => ConfigError::MissingKey(key),
                None => ConfigError::Parse(e.to_string()),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Upper bound on provider calls for one session.
    pub fn max_provider_calls(&self) -> usize {
        2 + 4 * self.max_critique_cycles as usize
    }
}

fn missing_field(msg: &str) -> Option<String> {
    let rest = msg.strip_prefix("missing field `")?;
    rest.split('`').next().map(str::to_string)
}
