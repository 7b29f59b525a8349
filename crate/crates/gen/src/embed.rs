//! Per-token embeddings for the semantic score: a static lexicon-file
//! embedder and a client for the embedding service.

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use readctl_core::text::normalized_tokens;

use crate::error::EmbedError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedText {
    pub tokens: Vec<String>,
    pub vectors: Vec<Vec<f64>>,
    #[serde(default)]
    pub truncated: bool,
}

pub trait Embedder: Send + Sync {
    fn model(&self) -> &str;

    /// One entry per input text, in order.
    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddedText>, EmbedError>;
}

/// Static vectors from a `word<TAB>v1 v2 ...` file. Tokens missing from the
/// file get a unit vector drawn from a generator seeded by the token's
/// SHA-256, so they are stable across runs and machines.
#[derive(Debug, Clone)]
pub struct LexiconEmbedder {
    dimension: usize,
    vectors: HashMap<String, Vec<f64>>,
    model: String,
}

impl LexiconEmbedder {
    /// An embedder with no file: every token is hashed.
    pub fn hashed(dimension: usize) -> Self {
        LexiconEmbedder {
            dimension: dimension.max(1),
            vectors: HashMap::new(),
            model: format!("hashed-{}", dimension.max(1)),
        }
    }

    pub fn parse(src: &str, model: impl Into<String>) -> Result<Self, EmbedError> {
        let mut vectors = HashMap::new();
        let mut dimension = None;
        for (idx, line) in src.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let malformed = |reason: String| EmbedError::Malformed { line: idx + 1, reason };
            let (word, rest) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected word<TAB>vector".into()))?;
            let v: Vec<f64> = rest
                .split_whitespace()
                .map(|x| x.parse::<f64>().map_err(|_| malformed(format!("bad number {x:?}"))))
                .collect::<Result<_, _>>()?;
            if v.is_empty() {
                return Err(malformed("empty vector".into()));
            }
            match dimension {
                None => dimension = Some(v.len()),
                Some(d) if d != v.len() => {
                    return Err(malformed(format!("expected {d} components, found {}", v.len())));
                }
                _ => {}
            }
            vectors.insert(word.trim().to_lowercase(), v);
        }
        let dimension = dimension.ok_or_else(|| EmbedError::Malformed {
            line: 0,
            reason: "no vectors".into(),
        })?;
        Ok(LexiconEmbedder {
            dimension,
            vectors,
            model: model.into(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, EmbedError> {
        let src = std::fs::read_to_string(path).map_err(|source| EmbedError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let model = format!("lexicon:{}", path.file_name().unwrap_or_default().to_string_lossy());
        Self::parse(&src, model)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    fn hashed_vector(&self, token: &str) -> Vec<f64> {
        let digest = Sha256::digest(token.as_bytes());
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        let mut rng = ChaCha8Rng::from_seed(seed);
        let v: Vec<f64> = (0..self.dimension).map(|_| StandardNormal.sample(&mut rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.into_iter().map(|x| x / norm).collect()
        } else {
            let mut e = vec![0.0; self.dimension];
            e[0] = 1.0;
            e
        }
    }

    pub fn vector(&self, token: &str) -> Vec<f64> {
        self.vectors
            .get(token)
            .cloned()
            .unwrap_or_else(|| self.hashed_vector(token))
    }
}

impl Embedder for LexiconEmbedder {
    fn model(&self) -> &str {
        &self.model
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddedText>, EmbedError> {
        Ok(texts
            .iter()
            .map(|text| {
                let tokens = normalized_tokens(text);
                let vectors = tokens.iter().map(|t| self.vector(t)).collect();
                EmbeddedText {
                    tokens,
                    vectors,
                    truncated: false,
                }
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedRequest {
    pub texts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbedResponse {
    pub model: String,
    pub dimension: usize,
    pub embeddings: Vec<EmbeddedText>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Health {
    pub model: String,
    pub dimension: usize,
    pub ready: bool,
}

/// Client for the embedding service (`GET /health`, `POST /embed`).
pub struct HttpEmbedder {
    base_url: String,
    model: String,
    agent: ureq::Agent,
}

impl HttpEmbedder {
    /// Checks `/health` and fails unless the service reports ready.
    pub fn connect(base_url: &str, model: Option<&str>, timeout: Duration) -> Result<Self, EmbedError> {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .into();
        let base_url = base_url.trim_end_matches('/').to_string();
        let mut embedder = HttpEmbedder {
            base_url,
            model: model.unwrap_or_default().to_string(),
            agent,
        };
        let health = embedder.health()?;
        if !health.ready {
            return Err(EmbedError::NotReady);
        }
        if embedder.model.is_empty() {
            embedder.model = health.model;
        }
        Ok(embedder)
    }

    pub fn health(&self) -> Result<Health, EmbedError> {
        let mut resp = self
            .agent
            .get(&format!("{}/health", self.base_url))
            .call()
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        match resp.status().as_u16() {
            200..=299 => resp
                .body_mut()
                .read_json::<Health>()
                .map_err(|e| EmbedError::MalformedResponse(e.to_string())),
            503 => Err(EmbedError::NotReady),
            s => Err(EmbedError::Status(s)),
        }
    }
}

impl Embedder for HttpEmbedder {
    fn model(&self) -> &str {
        &self.model
    }

    fn embed(&self, texts: &[&str]) -> Result<Vec<EmbeddedText>, EmbedError> {
        let request = EmbedRequest {
            texts: texts.iter().map(|t| t.to_string()).collect(),
            model: (!self.model.is_empty()).then(|| self.model.clone()),
        };
        let mut resp = self
            .agent
            .post(&format!("{}/embed", self.base_url))
            .send_json(&request)
            .map_err(|e| EmbedError::Transport(e.to_string()))?;
        let status = resp.status().as_u16();
        if status == 503 {
            return Err(EmbedError::NotReady);
        }
        if !(200..300).contains(&status) {
            return Err(EmbedError::Status(status));
        }
        let body: EmbedResponse = resp
            .body_mut()
            .read_json()
            .map_err(|e| EmbedError::MalformedResponse(e.to_string()))?;
        if body.embeddings.len() != texts.len() {
            return Err(EmbedError::MalformedResponse(format!(
                "{} embeddings for {} texts",
                body.embeddings.len(),
                texts.len()
            )));
        }
        for e in &body.embeddings {
            if e.tokens.len() != e.vectors.len() {
                return Err(EmbedError::MalformedResponse("token and vector counts differ".into()));
            }
            if e.vectors.iter().any(|v| v.len() != body.dimension) {
                return Err(EmbedError::MalformedResponse("vector dimension differs from declared".into()));
            }
        }
        Ok(body.embeddings)
    }
}
