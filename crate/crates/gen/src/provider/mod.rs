//! Paraphrase backends: an HTTP chat-completions client and an offline mock.

mod http;
mod limiter;
mod mock;

use serde::{Deserialize, Serialize};

pub use http::HttpChatProvider;
pub use limiter::{InFlightLimit, TokenBucket};
pub use mock::MockProvider;

use crate::config::{ProviderConfig, ProviderKind};
use crate::error::{ConfigError, GenerateError};
use crate::prompts::PromptPayload;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ProviderMeta {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub latency_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt_tokens: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub completion_tokens: Option<u64>,
    #[serde(default)]
    pub retries: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderOutput {
    pub text: String,
    pub meta: ProviderMeta,
}

/// A paraphrase backend. Implementations must tolerate concurrent calls.
pub trait Provider: Send + Sync {
    fn model(&self) -> &str;

    /// Checks that can fail before any request is made, such as a missing
    /// credential.
    fn preflight(&self) -> Result<(), GenerateError> {
        Ok(())
    }

    fn generate(&self, payload: &PromptPayload) -> Result<ProviderOutput, GenerateError>;
}

/// Builds the provider described by `config`.
pub fn from_config(config: &ProviderConfig) -> Result<Box<dyn Provider>, ConfigError> {
    config.validate()?;
    Ok(match config.kind {
        ProviderKind::Mock => Box::new(MockProvider::new(config.seed)),
        ProviderKind::ChatHttp => Box::new(HttpChatProvider::new(config.clone())?),
    })
}
