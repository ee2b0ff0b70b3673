//! One interface over chat-completion backends with tool calling.
//!
//! Every request goes through [`Gateway::chat`], which enforces a global
//! call ceiling, optionally records the exchange into a [`Transcript`], and
//! splits the reply's tool calls into schema-valid and invalid ones. Backends:
//!
//! * [`ScriptedBackend`]: canned replies queued per agent, for authoring
//!   fixtures and tests.
//! * [`ReplayBackend`]: replays a recorded transcript, checking that every
//!   request matches the recorded fingerprint.
//! * [`LiveBackend`]: an OpenAI-style `chat/completions` HTTP endpoint.

mod embed;
mod live;
mod message;
mod replay;
mod scripted;
mod tools;
mod transcript;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

pub use embed::{cosine, tokens, Embedder, HashedBow, LiveEmbedder, ReplayEmbedder};
pub use live::{parse_wire_response, wire_request, LiveBackend, LiveConfig};
pub use message::{check_conversation, AgentMessage, Role, ToolCall};
pub use replay::ReplayBackend;
pub use scripted::{Script, ScriptedBackend, ScriptedReply};
pub use tools::{ParamType, ToolArgError, ToolError, ToolParam, ToolRegistry, ToolSchema};
pub use transcript::{fingerprint, AnswerRecord, EmbeddingRecord, Transcript, TranscriptEntry};

/// Temperature used unless configured otherwise.
pub const DEFAULT_TEMPERATURE: f64 = 0.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    /// Which agent is asking. Used for routing scripted replies and for
    /// readable transcripts; not part of the fingerprint.
    pub agent: String,
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<AgentMessage>,
    #[serde(default)]
    pub tools: Vec<ToolSchema>,
}

impl ChatRequest {
    pub fn new(
        agent: &str,
        model: &str,
        messages: Vec<AgentMessage>,
        tools: &ToolRegistry,
    ) -> Self {
        ChatRequest {
            agent: agent.to_string(),
            model: model.to_string(),
            temperature: DEFAULT_TEMPERATURE,
            messages,
            tools: tools.schemas().to_vec(),
        }
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = t;
        self
    }

    pub fn check(&self) -> Result<(), String> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(format!(
                "temperature {} is outside [0, 2]",
                self.temperature
            ));
        }
        check_conversation(&self.messages)?;
        let mut names = std::collections::BTreeSet::new();
        for t in &self.tools {
            if !names.insert(&t.name) {
                return Err(format!("tool `{}` offered twice", t.name));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GatewayError {
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("network failure: {0}")]
    Network(String),
    #[error("backend returned an unusable response: {0}")]
    BadResponse(String),
    #[error("replay diverged at position {position}: expected fingerprint {expected}, got {actual} ({agent} request)")]
    FingerprintMismatch {
        position: usize,
        expected: String,
        actual: String,
        agent: String,
    },
    #[error("replay transcript exhausted at position {0}")]
    TranscriptExhausted(usize),
    #[error("no scripted reply left for agent `{0}`")]
    ScriptExhausted(String),
    #[error("gateway call ceiling of {0} reached")]
    CallCeiling(usize),
    #[error("embedding unavailable: {0}")]
    Embedding(String),
}

/// Produces assistant messages for requests.
pub trait ChatBackend: Send + Sync {
    fn chat(&self, request: &ChatRequest) -> Result<AgentMessage, GatewayError>;
}

/// A tool call after schema validation.
#[derive(Debug, Clone, PartialEq)]
pub enum CheckedCall {
    Valid(ToolCall),
    Invalid { call: ToolCall, error: ToolError },
}

impl CheckedCall {
    pub fn call(&self) -> &ToolCall {
        match self {
            CheckedCall::Valid(c) | CheckedCall::Invalid { call: c, .. } => c,
        }
    }
}

/// An assistant message plus its validated tool calls, in message order.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub message: AgentMessage,
    pub calls: Vec<CheckedCall>,
}

pub struct Gateway {
    backend: Box<dyn ChatBackend>,
    recorder: Option<Mutex<Transcript>>,
    calls: AtomicUsize,
    ceiling: Option<usize>,
}

impl Gateway {
    pub fn new(backend: impl ChatBackend + 'static) -> Self {
        Gateway {
            backend: Box::new(backend),
            recorder: None,
            calls: AtomicUsize::new(0),
            ceiling: None,
        }
    }

    /// Record every exchange into a transcript.
    pub fn recording(mut self) -> Self {
        self.recorder = Some(Mutex::new(Transcript::default()));
        self
    }

    /// Fail closed after `n` calls.
    pub fn with_ceiling(mut self, n: usize) -> Self {
        self.ceiling = Some(n);
        self
    }

    pub fn ceiling(&self) -> Option<usize> {
        self.ceiling
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }

    pub fn chat(&self, request: &ChatRequest) -> Result<Reply, GatewayError> {
        request.check().map_err(GatewayError::InvalidRequest)?;
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if let Some(limit) = self.ceiling {
            if n >= limit {
                self.calls.fetch_sub(1, Ordering::SeqCst);
                return Err(GatewayError::CallCeiling(limit));
            }
        }
        let message = self.backend.chat(request)?;
        if message.role != Role::Assistant {
            return Err(GatewayError::BadResponse(format!(
                "reply has role {:?}",
                message.role
            )));
        }
        message.check().map_err(GatewayError::BadResponse)?;
        if let Some(rec) = &self.recorder {
            let mut t = rec.lock().expect("recorder lock");
            t.entries.push(TranscriptEntry {
                agent: request.agent.clone(),
                fingerprint: fingerprint(request),
                response: message.clone(),
            });
        }
        let registry = ToolRegistry::from_tools(request.tools.iter().cloned())
            .map_err(|e| GatewayError::InvalidRequest(e.to_string()))?;
        let calls = message
            .tool_calls
            .iter()
            .map(|c| match registry.validate(c) {
                Ok(()) => CheckedCall::Valid(c.clone()),
                Err(error) => CheckedCall::Invalid {
                    call: c.clone(),
                    error,
                },
            })
            .collect();
        Ok(Reply { message, calls })
    }

    /// Note a user answer so that replays can reproduce the conversation
    /// without a terminal.
    pub fn record_answer(&self, question: &str, answer: &str) {
        if let Some(rec) = &self.recorder {
            rec.lock()
                .expect("recorder lock")
                .answers
                .push(AnswerRecord {
                    question: question.to_string(),
                    answer: answer.to_string(),
                });
        }
    }

    /// Note an embedding computed by a live embedder.
    pub fn record_embedding(&self, text: &str, vector: &[f64]) {
        if let Some(rec) = &self.recorder {
            rec.lock()
                .expect("recorder lock")
                .embeddings
                .push(EmbeddingRecord {
                    text: text.to_string(),
                    vector: vector.to_vec(),
                });
        }
    }

    /// Snapshot of the recorded transcript, if recording.
    pub fn transcript(&self) -> Option<Transcript> {
        self.recorder
            .as_ref()
            .map(|r| r.lock().expect("recorder lock").clone())
    }
}

#[cfg(test)]
mod tests;
