use std::collections::{BTreeMap, VecDeque};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::message::{AgentMessage, ToolCall};
use super::{ChatBackend, ChatRequest, GatewayError};

/// One canned assistant reply. `content` may be any JSON value; non-string
/// values are sent as their compact JSON text, which keeps fixtures that
/// carry domain models readable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptedReply {
    #[serde(default)]
    pub content: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ToolCall>,
}

impl ScriptedReply {
    pub fn text(content: &str) -> Self {
        ScriptedReply {
            content: Value::String(content.to_string()),
            tool_calls: Vec::new(),
        }
    }

    pub fn calls(content: &str, calls: Vec<ToolCall>) -> Self {
        ScriptedReply {
            content: Value::String(content.to_string()),
            tool_calls: calls,
        }
    }

    pub fn to_message(&self) -> AgentMessage {
        let content = match &self.content {
            Value::Null => String::new(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        AgentMessage::assistant_calls(content, self.tool_calls.clone())
    }
}

/// Replies queued per agent label, plus optional fallbacks used once an
/// agent's queue is empty.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Script {
    #[serde(default)]
    pub replies: BTreeMap<String, Vec<ScriptedReply>>,
    #[serde(default)]
    pub fallback: BTreeMap<String, ScriptedReply>,
}

impl Script {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn push(&mut self, agent: &str, reply: ScriptedReply) -> &mut Self {
        self.replies
            .entry(agent.to_string())
            .or_default()
            .push(reply);
        self
    }
}

pub struct ScriptedBackend {
    queues: Mutex<BTreeMap<String, VecDeque<ScriptedReply>>>,
    fallback: BTreeMap<String, ScriptedReply>,
}

impl ScriptedBackend {
    pub fn new(script: Script) -> Self {
        ScriptedBackend {
            queues: Mutex::new(
                script
                    .replies
                    .into_iter()
                    .map(|(k, v)| (k, v.into_iter().collect()))
                    .collect(),
            ),
            fallback: script.fallback,
        }
    }

    /// Replies not yet consumed, per agent.
    pub fn unused(&self) -> BTreeMap<String, usize> {
        self.queues
            .lock()
            .expect("script lock")
            .iter()
            .filter(|(_, q)| !q.is_empty())
            .map(|(k, q)| (k.clone(), q.len()))
            .collect()
    }
}

impl ChatBackend for ScriptedBackend {
    fn chat(&self, request: &ChatRequest) -> Result<AgentMessage, GatewayError> {
        let mut queues = self.queues.lock().expect("script lock");
        if let Some(reply) = queues.get_mut(&request.agent).and_then(VecDeque::pop_front) {
            return Ok(reply.to_message());
        }
        self.fallback
            .get(&request.agent)
            .map(ScriptedReply::to_message)
            .ok_or_else(|| GatewayError::ScriptExhausted(request.agent.clone()))
    }
}
