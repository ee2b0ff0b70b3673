//! Self-reflection: a critic scores generator output against a threshold.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::parse::strip_fences;
use super::prompts;
use crate::gateway::{AgentMessage, ChatRequest, Gateway, GatewayError, ToolRegistry};

pub const DEFAULT_TAU: f64 = 0.8;
pub const DEFAULT_CRITIC_ITERATIONS: usize = 3;
pub const CRITIC_AGENT: &str = "critic";

/// A scored review. `accepted` always equals `score >= tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticVerdict {
    pub score: f64,
    pub feedback: String,
    pub accepted: bool,
}

impl CriticVerdict {
    /// Interpret a critic reply. Anything other than a JSON object with a
    /// score in [0, 1] is a rejection whose feedback is the raw text.
    pub fn from_reply(text: &str, tau: f64) -> CriticVerdict {
        let parsed = serde_json::from_str::<Value>(strip_fences(text))
            .ok()
            .and_then(|v| {
                let score = v
                    .get("score")?
                    .as_f64()
                    .filter(|s| (0.0..=1.0).contains(s))?;
                let feedback = v
                    .get("feedback")
                    .and_then(Value::as_str)
                    .unwrap_or_default()
                    .to_string();
                Some((score, feedback))
            });
        match parsed {
            Some((score, feedback)) => {
                let accepted = score >= tau;
                let feedback = if !accepted && feedback.trim().is_empty() {
                    format!("score {score} is below the acceptance threshold {tau}")
                } else {
                    feedback
                };
                CriticVerdict {
                    score,
                    feedback,
                    accepted,
                }
            }
            None => CriticVerdict {
                score: 0.0,
                feedback: if text.trim().is_empty() {
                    "the critic returned no review".to_string()
                } else {
                    text.to_string()
                },
                accepted: false,
            },
        }
    }
}

/// Ask the critic to review `response` for `task`.
pub fn critic_review(
    gateway: &Gateway,
    model: &str,
    temperature: f64,
    task: &str,
    response: &str,
    tau: f64,
) -> Result<CriticVerdict, GatewayError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(GatewayError::InvalidRequest(format!(
            "critic threshold {tau} is outside [0, 1]"
        )));
    }
    let messages = vec![
        AgentMessage::system(prompts::CRITIC),
        AgentMessage::user(format!("Task:\n{task}\n\nResponse to review:\n{response}")),
    ];
    let request = ChatRequest::new(CRITIC_AGENT, model, messages, &ToolRegistry::new())
        .with_temperature(temperature);
    let reply = gateway.chat(&request)?;
    Ok(CriticVerdict::from_reply(&reply.message.content, tau))
}
