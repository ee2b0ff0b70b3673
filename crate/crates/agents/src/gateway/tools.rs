//! Tool schemas and argument validation.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::message::ToolCall;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamType {
    String,
    Integer,
    Number,
    Boolean,
}

impl ParamType {
    fn accepts(self, v: &Value) -> bool {
        match self {
            ParamType::String => v.is_string(),
            ParamType::Integer => v.is_i64() || v.is_u64(),
            ParamType::Number => v.is_number(),
            ParamType::Boolean => v.is_boolean(),
        }
    }

    fn json_name(self) -> &'static str {
        match self {
            ParamType::String => "string",
            ParamType::Integer => "integer",
            ParamType::Number => "number",
            ParamType::Boolean => "boolean",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToolParam {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ParamType,
    pub required: bool,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ToolSchema {
    pub name: String,
    pub description: String,
    pub parameters: Vec<ToolParam>,
}

impl ToolSchema {
    pub fn new(name: &str, description: &str) -> Self {
        ToolSchema {
            name: name.to_string(),
            description: description.to_string(),
            parameters: Vec::new(),
        }
    }

    /// Builder: add a required string parameter.
    pub fn string(mut self, name: &str, description: &str) -> Self {
        self.parameters.push(ToolParam {
            name: name.to_string(),
            ty: ParamType::String,
            required: true,
            description: description.to_string(),
        });
        self
    }

    /// JSON-schema `parameters` object as used by chat-completion APIs.
    pub fn json_schema(&self) -> Value {
        let mut props = serde_json::Map::new();
        for p in &self.parameters {
            props.insert(
                p.name.clone(),
                json!({ "type": p.ty.json_name(), "description": p.description }),
            );
        }
        let required: Vec<&str> = self
            .parameters
            .iter()
            .filter(|p| p.required)
            .map(|p| p.name.as_str())
            .collect();
        json!({ "type": "object", "properties": props, "required": required })
    }

    /// Check a call's arguments against this schema.
    pub fn validate(&self, call: &ToolCall) -> Result<(), ToolArgError> {
        let mut err = ToolArgError {
            tool: self.name.clone(),
            missing: Vec::new(),
            unexpected: Vec::new(),
            mistyped: Vec::new(),
        };
        for p in &self.parameters {
            match call.arguments.get(&p.name) {
                None | Some(Value::Null) if p.required => err.missing.push(p.name.clone()),
                None | Some(Value::Null) => {}
                Some(v) if !p.ty.accepts(v) => err.mistyped.push(p.name.clone()),
                Some(_) => {}
            }
        }
        for k in call.arguments.keys() {
            if !self.parameters.iter().any(|p| &p.name == k) {
                err.unexpected.push(k.clone());
            }
        }
        if err.missing.is_empty() && err.unexpected.is_empty() && err.mistyped.is_empty() {
            Ok(())
        } else {
            Err(err)
        }
    }
}

/// Why a tool call's arguments were refused. Shown to the calling agent as
/// feedback.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid arguments for `{tool}`: {}", self.describe())]
pub struct ToolArgError {
    pub tool: String,
    pub missing: Vec<String>,
    pub unexpected: Vec<String>,
    pub mistyped: Vec<String>,
}

impl ToolArgError {
    fn describe(&self) -> String {
        let mut parts = Vec::new();
        if !self.missing.is_empty() {
            parts.push(format!("missing required {}", self.missing.join(", ")));
        }
        if !self.mistyped.is_empty() {
            parts.push(format!("wrong type for {}", self.mistyped.join(", ")));
        }
        if !self.unexpected.is_empty() {
            parts.push(format!("unexpected {}", self.unexpected.join(", ")));
        }
        parts.join("; ")
    }
}

/// Tools offered in one request. Names are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToolRegistry {
    tools: Vec<ToolSchema>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ToolError {
    #[error("tool `{0}` is already registered")]
    Duplicate(String),
    #[error("unknown tool `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Arguments(#[from] ToolArgError),
}

impl ToolRegistry {
    pub fn new() -> Self {
        ToolRegistry::default()
    }

    pub fn register(&mut self, tool: ToolSchema) -> Result<(), ToolError> {
        if self.get(&tool.name).is_some() {
            return Err(ToolError::Duplicate(tool.name));
        }
        self.tools.push(tool);
        Ok(())
    }

    pub fn from_tools(tools: impl IntoIterator<Item = ToolSchema>) -> Result<Self, ToolError> {
        let mut r = ToolRegistry::new();
        for t in tools {
            r.register(t)?;
        }
        Ok(r)
    }

    pub fn get(&self, name: &str) -> Option<&ToolSchema> {
        self.tools.iter().find(|t| t.name == name)
    }

    pub fn schemas(&self) -> &[ToolSchema] {
        &self.tools
    }

    pub fn is_empty(&self) -> bool {
        self.tools.is_empty()
    }

    pub fn validate(&self, call: &ToolCall) -> Result<(), ToolError> {
        let tool = self
            .get(&call.name)
            .ok_or_else(|| ToolError::Unknown(call.name.clone()))?;
        Ok(tool.validate(call)?)
    }
}
