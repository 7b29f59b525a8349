use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::Deserialize;
use serde_json::json;

use super::limiter::{InFlightLimit, TokenBucket};
use super::{Provider, ProviderMeta, ProviderOutput};
use crate::config::ProviderConfig;
use crate::error::{ConfigError, GenerateError};
use crate::prompts::PromptPayload;

/// Client for an OpenAI-style chat-completions endpoint.
///
/// Retries timeouts, transport failures, 429 and 5xx responses with
/// exponential backoff; 401 and 403 fail immediately.
pub struct HttpChatProvider {
    config: ProviderConfig,
    endpoint: String,
    model: String,
    agent: ureq::Agent,
    in_flight: InFlightLimit,
    bucket: TokenBucket,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    #[serde(default)]
    usage: Option<Usage>,
}

#[derive(Deserialize)]
struct Choice {
    message: Message,
}

#[derive(Deserialize)]
struct Message {
    content: Option<String>,
}

#[derive(Deserialize)]
struct Usage {
    prompt_tokens: Option<u64>,
    completion_tokens: Option<u64>,
}

enum Attempt {
    Done(ProviderOutput),
    Retry(GenerateError, Option<Duration>),
    Fail(GenerateError),
}

impl HttpChatProvider {
    pub fn new(config: ProviderConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let endpoint = config.endpoint.clone().ok_or(ConfigError::MissingField("endpoint"))?;
        let model = config.model_name.clone().ok_or(ConfigError::MissingField("model_name"))?;
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.request_timeout()))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(HttpChatProvider {
            in_flight: InFlightLimit::new(config.max_in_flight),
            bucket: TokenBucket::new(config.requests_per_second),
            config,
            endpoint,
            model,
            agent,
        })
    }

    fn api_key(&self) -> Result<String, GenerateError> {
        match std::env::var(&self.config.api_key_env) {
            Ok(key) if !key.trim().is_empty() => Ok(key),
            _ => Err(GenerateError::Auth(format!(
                "environment variable {} is not set",
                self.config.api_key_env
            ))),
        }
    }

    fn attempt(&self, key: &str, body: &serde_json::Value, attempts: u32, retries: u32) -> Attempt {
        self.bucket.take();
        let _slot = self.in_flight.acquire();
        let started = Instant::now();
        let sent = self
            .agent
            .post(&self.endpoint)
            .header("Authorization", &format!("Bearer {key}"))
            .send_json(body);
        let mut resp = match sent {
            Ok(r) => r,
            Err(ureq::Error::Timeout(_)) => return Attempt::Retry(GenerateError::Timeout { attempts }, None),
            Err(e) => {
                return Attempt::Retry(
                    GenerateError::Transport {
                        message: e.to_string(),
                        attempts,
                    },
                    None,
                )
            }
        };
        let status = resp.status().as_u16();
        match status {
            200..=299 => {}
            401 | 403 => return Attempt::Fail(GenerateError::Auth(format!("status {status}"))),
            429 => {
                let after = resp
                    .headers()
                    .get("retry-after")
                    .and_then(|v| v.to_str().ok())
                    .and_then(|v| v.trim().parse::<f64>().ok())
                    .filter(|s| s.is_finite() && *s >= 0.0)
                    .map(Duration::from_secs_f64);
                return Attempt::Retry(GenerateError::RateLimitExhausted { attempts }, after);
            }
            500..=599 => return Attempt::Retry(GenerateError::Server { status, attempts }, None),
            _ => return Attempt::Fail(GenerateError::Server { status, attempts }),
        }
        let parsed: ChatResponse = match resp.body_mut().read_json() {
            Ok(p) => p,
            Err(ureq::Error::Timeout(_)) => return Attempt::Retry(GenerateError::Timeout { attempts }, None),
            Err(e) => return Attempt::Fail(GenerateError::MalformedResponse(e.to_string())),
        };
        let Some(text) = parsed.choices.into_iter().next().and_then(|c| c.message.content) else {
            return Attempt::Fail(GenerateError::MalformedResponse("no message content in choices".into()));
        };
        let usage = parsed.usage;
        Attempt::Done(ProviderOutput {
            text,
            meta: ProviderMeta {
                model: self.model.clone(),
                latency_ms: Some(started.elapsed().as_millis() as u64),
                prompt_tokens: usage.as_ref().and_then(|u| u.prompt_tokens),
                completion_tokens: usage.as_ref().and_then(|u| u.completion_tokens),
                retries,
            },
        })
    }
}

impl Provider for HttpChatProvider {
    fn model(&self) -> &str {
        &self.model
    }

    fn preflight(&self) -> Result<(), GenerateError> {
        self.api_key().map(drop)
    }

    fn generate(&self, payload: &PromptPayload) -> Result<ProviderOutput, GenerateError> {
        let key = self.api_key()?;
        let body = json!({
            "model": self.model,
            "messages": payload.messages(self.config.system_prompt.as_deref()),
            "temperature": self.config.temperature,
        });
        let mut retries = 0u32;
        loop {
            match self.attempt(&key, &body, retries + 1, retries) {
                Attempt::Done(out) => return Ok(out),
                Attempt::Fail(e) => return Err(e),
                Attempt::Retry(e, after) => {
                    if retries >= self.config.max_retries {
                        warn!("giving up after {} attempt(s): {e}", retries + 1);
                        return Err(e);
                    }
                    retries += 1;
                    let delay = self.config.backoff(retries).max(after.unwrap_or_default());
                    debug!("retry {retries} in {delay:?}: {e}");
                    std::thread::sleep(delay);
                }
            }
        }
    }
}
