//! HTTP backend for OpenAI-style `chat/completions` endpoints.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::message::{AgentMessage, Role, ToolCall};
use super::{ChatBackend, ChatRequest, GatewayError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LiveConfig {
    pub base_url: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: u64,
    /// Extra request fields passed through untouched (for example `top_p`).
    pub extra: BTreeMap<String, Value>,
}

impl Default for LiveConfig {
    fn default() -> Self {
        LiveConfig {
            base_url: "https://api.openai.com/v1".to_string(),
            api_key_env: "ADAPLAN_API_KEY".to_string(),
            timeout_secs: 120,
            extra: BTreeMap::new(),
        }
    }
}

pub struct LiveBackend {
    config: LiveConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl LiveBackend {
    /// Reads the API key from the configured environment variable.
    pub fn new(config: LiveConfig) -> Result<Self, GatewayError> {
        let api_key = std::env::var(&config.api_key_env).map_err(|_| {
            GatewayError::Network(format!(
                "environment variable {} is not set",
                config.api_key_env
            ))
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(config.timeout_secs))
            .build()
            .map_err(|e| GatewayError::Network(e.to_string()))?;
        Ok(LiveBackend {
            config,
            api_key,
            client,
        })
    }

    pub(crate) fn post(&self, path: &str, body: &Value) -> Result<Value, GatewayError> {
        let url = format!("{}/{path}", self.config.base_url.trim_end_matches('/'));
        let resp = self
            .client
            .post(url)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| GatewayError::Network(e.to_string()))?;
        let status = resp.status();
        let value: Value = resp
            .json()
            .map_err(|e| GatewayError::BadResponse(e.to_string()))?;
        if !status.is_success() {
            return Err(GatewayError::Network(format!("HTTP {status}: {value}")));
        }
        Ok(value)
    }
}

/// Request body in the wire format of the chat-completions API.
pub fn wire_request(request: &ChatRequest, extra: &BTreeMap<String, Value>) -> Value {
    let messages: Vec<Value> = request.messages.iter().map(wire_message).collect();
    let mut body = json!({
        "model": request.model,
        "temperature": request.temperature,
        "messages": messages,
    });
    if !request.tools.is_empty() {
        body["tools"] = request
            .tools
            .iter()
            .map(|t| {
                json!({
                    "type": "function",
                    "function": {
                        "name": t.name,
                        "description": t.description,
                        "parameters": t.json_schema(),
                    }
                })
            })
            .collect();
    }
    for (k, v) in extra {
        body[k] = v.clone();
    }
    body
}

fn wire_message(m: &AgentMessage) -> Value {
    let role = match m.role {
        Role::System => "system",
        Role::User => "user",
        Role::Assistant => "assistant",
        Role::ToolResult => "tool",
    };
    let mut v = json!({ "role": role, "content": m.content });
    if !m.tool_calls.is_empty() {
        v["tool_calls"] = m
            .tool_calls
            .iter()
            .map(|c| {
                json!({
                    "id": c.id,
                    "type": "function",
                    "function": {
                        "name": c.name,
                        "arguments": serde_json::to_string(&c.arguments).expect("arguments serialize"),
                    }
                })
            })
            .collect();
    }
    if let Some(id) = &m.tool_call_id {
        v["tool_call_id"] = json!(id);
    }
    v
}

/// Parse the first choice of a chat-completions response. Arguments that
/// are not a JSON object are kept under `_raw` so that schema validation
/// reports them to the agent.
pub fn parse_wire_response(body: &Value) -> Result<AgentMessage, GatewayError> {
    let msg = body
        .pointer("/choices/0/message")
        .ok_or_else(|| GatewayError::BadResponse(format!("no choices in {body}")))?;
    let content = msg
        .get("content")
        .and_then(Value::as_str)
        .unwrap_or_default();
    let mut calls = Vec::new();
    if let Some(list) = msg.get("tool_calls").and_then(Value::as_array) {
        for c in list {
            let id = c.get("id").and_then(Value::as_str).unwrap_or_default();
            let name = c
                .pointer("/function/name")
                .and_then(Value::as_str)
                .unwrap_or_default();
            let raw = c
                .pointer("/function/arguments")
                .and_then(Value::as_str)
                .unwrap_or("{}");
            let arguments = match serde_json::from_str::<Value>(raw) {
                Ok(Value::Object(map)) => map.into_iter().collect(),
                _ => BTreeMap::from([("_raw".to_string(), Value::String(raw.to_string()))]),
            };
            calls.push(ToolCall {
                id: id.to_string(),
                name: name.to_string(),
                arguments,
            });
        }
    }
    Ok(AgentMessage::assistant_calls(content, calls))
}

impl ChatBackend for LiveBackend {
    fn chat(&self, request: &ChatRequest) -> Result<AgentMessage, GatewayError> {
        let body = wire_request(request, &self.config.extra);
        let value = self.post("chat/completions", &body)?;
        parse_wire_response(&value)
    }
}
