use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderKind {
    ChatHttp,
    #[default]
    Mock,
}

impl std::str::FromStr for ProviderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chat-http" => Ok(ProviderKind::ChatHttp),
            "mock" => Ok(ProviderKind::Mock),
            other => Err(format!("unknown provider kind {other:?} (expected chat-http or mock)")),
        }
    }
}

/// Provider settings. Credentials are never stored here, only the name of
/// the environment variable that holds them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub endpoint: Option<String>,
    pub model_name: Option<String>,
    pub api_key_env: String,
    pub temperature: f64,
    pub max_retries: u32,
    pub retry_initial_ms: u64,
    pub retry_multiplier: f64,
    pub request_timeout_secs: f64,
    pub max_in_flight: usize,
    /// Shared request rate limit; 0 disables it.
    pub requests_per_second: f64,
    /// Seed for the mock provider.
    pub seed: u64,
    pub system_prompt: Option<String>,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::Mock,
            endpoint: None,
            model_name: None,
            api_key_env: "READCTL_API_KEY".into(),
            temperature: 1.0,
            max_retries: 4,
            retry_initial_ms: 500,
            retry_multiplier: 2.0,
            request_timeout_secs: 60.0,
            max_in_flight: 4,
            requests_per_second: 0.0,
            seed: 0,
            system_prompt: None,
        }
    }
}

impl ProviderConfig {
    pub fn mock(seed: u64) -> Self {
        ProviderConfig {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.kind == ProviderKind::ChatHttp {
            if self.endpoint.as_deref().is_none_or(str::is_empty) {
                return Err(ConfigError::MissingField("endpoint"));
            }
            if self.model_name.as_deref().is_none_or(str::is_empty) {
                return Err(ConfigError::MissingField("model_name"));
            }
        }
        let invalid = |field, reason: &str| {
            Err(ConfigError::Invalid {
                field,
                reason: reason.to_string(),
            })
        };
        if !(self.temperature >= 0.0 && self.temperature.is_finite()) {
            return invalid("temperature", "must be a finite number >= 0");
        }
        if !(self.retry_multiplier >= 1.0 && self.retry_multiplier.is_finite()) {
            return invalid("retry_multiplier", "must be >= 1");
        }
        if !(self.request_timeout_secs > 0.0 && self.request_timeout_secs.is_finite()) {
            return invalid("request_timeout_secs", "must be > 0");
        }
        if self.max_in_flight == 0 {
            return invalid("max_in_flight", "must be >= 1");
        }
        if !(self.requests_per_second >= 0.0 && self.requests_per_second.is_finite()) {
            return invalid("requests_per_second", "must be >= 0");
        }
        Ok(())
    }

    pub fn request_timeout(&self) -> Duration {
        Duration::from_secs_f64(self.request_timeout_secs)
    }

    /// Delay before retry number `retry` (1-based).
    pub fn backoff(&self, retry: u32) -> Duration {
        let ms = self.retry_initial_ms as f64 * self.retry_multiplier.powi(retry.saturating_sub(1) as i32);
        Duration::from_millis(ms.min(u64::MAX as f64) as u64)
    }
}
