//! Conversation wire types shared by every agent and backend.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    System,
    User,
    Assistant,
    ToolResult,
}

/// A tool invocation requested by the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub arguments: BTreeMap<String, Value>,
}

impl ToolCall {
    pub fn new(id: &str, name: &str, arguments: &[(&str, Value)]) -> Self {
        ToolCall {
            id: id.to_string(),
            name: name.to_string(),
            arguments: arguments
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        }
    }

    /// String argument, or the JSON rendering of a non-string value.
    pub fn arg(&self, name: &str) -> Option<String> {
        self.arguments.get(name).map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentMessage {
    pub role: Role,
    #[serde(default)]
    pub content: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tool_calls: Vec<ToolCall>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tool_call_id: Option<String>,
}

impl AgentMessage {
    fn plain(role: Role, content: impl Into<String>) -> Self {
        AgentMessage {
            role,
            content: content.into(),
            tool_calls: Vec::new(),
            tool_call_id: None,
        }
    }

    pub fn system(content: impl Into<String>) -> Self {
        Self::plain(Role::System, content)
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self::plain(Role::User, content)
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        Self::plain(Role::Assistant, content)
    }

    pub fn assistant_calls(content: impl Into<String>, calls: Vec<ToolCall>) -> Self {
        AgentMessage {
            tool_calls: calls,
            ..Self::plain(Role::Assistant, content)
        }
    }

    pub fn tool_result(call_id: &str, content: impl Into<String>) -> Self {
        AgentMessage {
            tool_call_id: Some(call_id.to_string()),
            ..Self::plain(Role::ToolResult, content)
        }
    }

    /// Check the per-message invariants: tool calls only on assistant
    /// messages, and a call id exactly on tool results.
    pub fn check(&self) -> Result<(), String> {
        if !self.tool_calls.is_empty() && self.role != Role::Assistant {
            return Err(format!("{:?} message carries tool calls", self.role));
        }
        match (self.role, &self.tool_call_id) {
            (Role::ToolResult, None) => Err("tool result without tool_call_id".to_string()),
            (Role::ToolResult, Some(_)) | (_, None) => Ok(()),
            (r, Some(_)) => Err(format!("{r:?} message carries a tool_call_id")),
        }
    }
}

/// Check a whole conversation: the first message is a system message and
/// every tool result answers a call made earlier.
pub fn check_conversation(messages: &[AgentMessage]) -> Result<(), String> {
    if messages.first().map(|m| m.role) != Some(Role::System) {
        return Err("conversation must start with a system message".to_string());
    }
    let mut calls = std::collections::BTreeSet::new();
    for (i, m) in messages.iter().enumerate() {
        m.check().map_err(|e| format!("message {i}: {e}"))?;
        for c in &m.tool_calls {
            calls.insert(c.id.as_str());
        }
        if let Some(id) = &m.tool_call_id {
            if !calls.contains(id.as_str()) {
                return Err(format!("message {i}: tool result for unknown call `{id}`"));
            }
        }
    }
    Ok(())
}
