//! Text embedders.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use super::live::{LiveBackend, LiveConfig};
use super::transcript::EmbeddingRecord;
use super::GatewayError;

pub trait Embedder: Send + Sync {
    /// Stable identifier; stores refuse entries from another embedder.
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError>;
}

/// Hashed bag of words: every lower-cased alphanumeric token adds one to
/// the bucket selected by its 64-bit FNV-1a hash. Vectors hold small
/// integer counts, so dot products and squared norms are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashedBow {
    pub dim: usize,
}

impl Default for HashedBow {
    fn default() -> Self {
        HashedBow { dim: 256 }
    }
}

/// Lower-cased runs of ASCII alphanumerics and `_`.
pub fn tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
        .filter(|t| !t.is_empty())
        .map(str::to_ascii_lowercase)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

impl HashedBow {
    pub fn bucket(&self, token: &str) -> usize {
        (fnv1a(token.as_bytes()) % self.dim as u64) as usize
    }
}

impl Embedder for HashedBow {
    fn id(&self) -> String {
        format!("hashed-bow-{}", self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError> {
        let mut v = vec![0.0; self.dim];
        for t in tokens(text) {
            v[self.bucket(&t)] += 1.0;
        }
        Ok(v)
    }
}

/// Cosine similarity `a·b / (‖a‖‖b‖)`. A zero vector scores 0 against
/// everything.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum();
    let nb: f64 = b.iter().map(|x| x * x).sum();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot / (na * nb).sqrt()
}

/// Embeddings from an OpenAI-style `embeddings` endpoint.
pub struct LiveEmbedder {
    backend: LiveBackend,
    model: String,
    dim: usize,
}

impl LiveEmbedder {
    pub fn new(config: LiveConfig, model: &str, dim: usize) -> Result<Self, GatewayError> {
        Ok(LiveEmbedder {
            backend: LiveBackend::new(config)?,
            model: model.to_string(),
            dim,
        })
    }
}

impl Embedder for LiveEmbedder {
    fn id(&self) -> String {
        format!("live-{}", self.model)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError> {
        let body = json!({ "model": self.model, "input": text });
        let value = self
            .backend
            .post("embeddings", &body)
            .map_err(|e| GatewayError::Embedding(e.to_string()))?;
        let v: Vec<f64> = value
            .pointer("/data/0/embedding")
            .and_then(Value::as_array)
            .ok_or_else(|| GatewayError::Embedding(format!("no embedding in {value}")))?
            .iter()
            .map(|x| x.as_f64().unwrap_or(0.0))
            .collect();
        if v.len() != self.dim {
            return Err(GatewayError::Embedding(format!(
                "expected dimension {}, got {}",
                self.dim,
                v.len()
            )));
        }
        Ok(v)
    }
}

/// Serves embeddings recorded in a transcript, keyed by exact text.
pub struct ReplayEmbedder {
    id: String,
    dim: usize,
    table: BTreeMap<String, Vec<f64>>,
}

impl ReplayEmbedder {
    pub fn new(id: &str, dim: usize, records: &[EmbeddingRecord]) -> Self {
        ReplayEmbedder {
            id: id.to_string(),
            dim,
            table: records
                .iter()
                .map(|r| (r.text.clone(), r.vector.clone()))
                .collect(),
        }
    }
}

impl Embedder for ReplayEmbedder {
    fn id(&self) -> String {
        self.id.clone()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn embed(&self, text: &str) -> Result<Vec<f64>, GatewayError> {
        self.table
            .get(text)
            .cloned()
            .ok_or_else(|| GatewayError::Embedding(format!("no recorded embedding for {text:?}")))
    }
}
