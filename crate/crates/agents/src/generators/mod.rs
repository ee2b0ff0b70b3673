//! The generator agents that turn natural language into a planning
//! problem, and the orchestrator that runs them.
//!
//! Three agents work in sequence: the domain agent writes a PDDL domain,
//! the initial-state agent declares objects and initial facts, and the
//! goal agent writes the goal. Downstream agents never edit upstream
//! artifacts themselves. They call tools (`missing_or_incorrect_fluent`,
//! `action_modification`, `missing_objects`) that the orchestrator routes
//! to the owning agent, which applies or rejects the change; an applied
//! change makes the downstream agents regenerate. A critic reviews each
//! accepted output, and every agent session is bounded by a correction
//! limit counted in generation turns.

mod critic;
mod parse;
mod pipeline;
pub mod prompts;
pub mod tools;
mod user;

use std::collections::BTreeMap;

use adaplan_core::ir::{DomainEdit, ObjectDecl, ProblemInstance};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use critic::{
    critic_review, CriticVerdict, CRITIC_AGENT, DEFAULT_CRITIC_ITERATIONS, DEFAULT_TAU,
};
pub use parse::{
    domain_output, edit_output, goal_output, init_output, render_state, strip_fences, EditDecision,
    Unusable,
};
pub use pipeline::{run_pipeline, Memory, Pipeline, Task};
pub use user::{NoUser, ReplayUser, ScriptedUser, TerminalUser, UserChannel, UserError};

/// Generation turns allowed per agent session.
pub const DEFAULT_CORRECTION_LIMIT: usize = 10;
/// Hard stop on gateway calls in one pipeline run.
pub const DEFAULT_CALL_CEILING: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AgentRole {
    Domain,
    InitialState,
    Goal,
}

impl AgentRole {
    /// Label used in requests, transcripts and scripts.
    pub fn label(self) -> &'static str {
        match self {
            AgentRole::Domain => "domain",
            AgentRole::InitialState => "init",
            AgentRole::Goal => "goal",
        }
    }

    pub fn system_prompt(self) -> &'static str {
        match self {
            AgentRole::Domain => prompts::DOMAIN,
            AgentRole::InitialState => prompts::INIT,
            AgentRole::Goal => prompts::GOAL,
        }
    }
}

/// Settings of one generator agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub role: AgentRole,
    pub system_prompt: String,
    pub correction_limit: usize,
    pub tau: f64,
    pub critic_iterations: usize,
}

impl AgentConfig {
    pub fn new(role: AgentRole, cfg: &PipelineConfig) -> Self {
        AgentConfig {
            role,
            system_prompt: role.system_prompt().to_string(),
            correction_limit: cfg.correction_limit,
            tau: cfg.tau,
            critic_iterations: cfg.critic_iterations,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.correction_limit == 0 || self.critic_iterations == 0 {
            return Err("agent limits must be at least 1".to_string());
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(format!("critic threshold {} is outside [0, 1]", self.tau));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub model: String,
    pub temperature: f64,
    pub correction_limit: usize,
    pub tau: f64,
    pub critic_iterations: usize,
    /// Review accepted outputs with the critic.
    pub critic: bool,
    /// Non-system messages kept per agent session.
    pub context_capacity: usize,
    pub memory_k: usize,
    pub memory_threshold: f64,
    /// Downstream regenerations allowed after applied requests.
    pub max_restarts: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            model: "gpt-4o".to_string(),
            temperature: crate::gateway::DEFAULT_TEMPERATURE,
            correction_limit: DEFAULT_CORRECTION_LIMIT,
            tau: DEFAULT_TAU,
            critic_iterations: DEFAULT_CRITIC_ITERATIONS,
            critic: true,
            context_capacity: 48,
            memory_k: crate::memory::DEFAULT_K,
            memory_threshold: crate::memory::DEFAULT_THRESHOLD,
            max_restarts: 5,
        }
    }
}

impl PipelineConfig {
    pub fn check(&self) -> Result<(), String> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(format!(
                "temperature {} is outside [0, 2]",
                self.temperature
            ));
        }
        for role in [AgentRole::Domain, AgentRole::InitialState, AgentRole::Goal] {
            AgentConfig::new(role, self).check()?;
        }
        if self.context_capacity < 2 {
            return Err("context capacity must be at least 2".to_string());
        }
        if self.memory_k == 0 {
            return Err("memory k must be at least 1".to_string());
        }
        if !(-1.0..=1.0).contains(&self.memory_threshold) {
            return Err(format!(
                "memory threshold {} is outside [-1, 1]",
                self.memory_threshold
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PipelineStatus {
    Complete,
    CorrectionLimitReached,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum RequestKind {
    /// A fluent or action change routed to the domain agent.
    DomainEdit {
        tool: String,
        arguments: BTreeMap<String, Value>,
        /// The edits the domain agent proposed, with provenance.
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        edits: Vec<DomainEdit>,
    },
    AddObjects {
        object_type: String,
        object_description: String,
        /// Objects the regenerated initial state declared in response.
        #[serde(default)]
        added: Vec<ObjectDecl>,
    },
    UserQuery {
        question: String,
        answer: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "reason", rename_all = "kebab-case")]
pub enum RequestOutcome {
    Applied,
    Rejected(String),
    Answered,
    Unanswered(String),
}

/// A change or question flowing from a downstream agent to its owner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpstreamRequest {
    pub origin: AgentRole,
    /// `domain`, `init` or `user`.
    pub target: String,
    #[serde(flatten)]
    pub kind: RequestKind,
    pub outcome: RequestOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineEvent {
    pub agent: String,
    pub event: String,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureKind {
    Config,
    Interaction,
    Gateway,
    CallCeiling,
    RestartLimit,
    Memory,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub message: String,
}

/// Which agent ran out of generation turns, and why its last attempt
/// failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitHit {
    pub agent: AgentRole,
    pub turns: usize,
    pub last_error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub status: PipelineStatus,
    /// The final problem when complete; otherwise the best candidate, if
    /// one could be assembled.
    pub problem: Option<ProblemInstance>,
    pub requests: Vec<UpstreamRequest>,
    pub events: Vec<PipelineEvent>,
    pub gateway_calls: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit: Option<LimitHit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

impl PipelineResult {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("result serializes");
        s.push('\n');
        s
    }

    /// Generation turns recorded for `agent` (tool turns included).
    pub fn turns(&self, agent: AgentRole) -> usize {
        self.events
            .iter()
            .filter(|e| e.agent == agent.label() && e.event.starts_with("turn"))
            .count()
    }
}
