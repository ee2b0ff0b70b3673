//! Recorded exchanges for deterministic replay.

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use super::message::AgentMessage;
use super::ChatRequest;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub agent: String,
    pub fingerprint: String,
    pub response: AgentMessage,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerRecord {
    pub question: String,
    pub answer: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub text: String,
    pub vector: Vec<f64>,
}

/// Ordered request fingerprints with the responses they received, plus
/// the user answers and embeddings observed while recording.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub answers: Vec<AnswerRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub embeddings: Vec<EmbeddingRecord>,
}

impl Transcript {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("transcript serializes");
        s.push('\n');
        s
    }
}

/// SHA-256 over the semantic content of a request: each message's role,
/// content, tool calls and call id, and the offered tool schemas. Model
/// name, temperature and agent label are excluded.
pub fn fingerprint(request: &ChatRequest) -> String {
    let canonical = json!({
        "messages": request.messages,
        "tools": request.tools,
    });
    let bytes = serde_json::to_vec(&canonical).expect("request serializes");
    hex::encode(Sha256::digest(&bytes))
}
