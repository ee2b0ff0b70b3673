//! Retrieval-assisted repair of rejected planning artifacts.
//!
//! When a generated domain or problem is refused by the codec, the
//! validator or the grounder, [`diagnose`] looks up the documentation
//! snippets closest to the error message, shows them to the model together
//! with the artifact, and checks the proposed correction with a caller
//! supplied verifier. A proposal that fails verification gets one retry
//! with the new error appended; after that the last attempt is returned
//! flagged as unverified.

mod index;

use std::fmt::Write as _;

use adaplan_core::ir::{self, DomainModel, ProblemInstance};
use adaplan_core::{pddl, planner};
use serde::{Deserialize, Serialize};

use crate::gateway::{
    AgentMessage, ChatRequest, Embedder, Gateway, ToolRegistry, DEFAULT_TEMPERATURE,
};
use crate::generators::{domain_output, prompts, strip_fences};

pub use index::{split_sections, DocError, DocIndex, RetrievedSnippet, Snippet, SECTION_MARKER};

pub const DEBUGGER_AGENT: &str = "debugger";
/// Snippets retrieved per diagnosis.
pub const DEFAULT_SNIPPETS: usize = 4;
/// Verification failures answered with another attempt.
pub const MAX_RETRIES: usize = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DebugConfig {
    pub model: String,
    pub temperature: f64,
    pub k: usize,
}

impl Default for DebugConfig {
    fn default() -> Self {
        DebugConfig {
            model: "gpt-4o".to_string(),
            temperature: DEFAULT_TEMPERATURE,
            k: DEFAULT_SNIPPETS,
        }
    }
}

/// The outcome of one debugging session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub snippets: Vec<RetrievedSnippet>,
    /// The last corrected artifact proposed, fences removed. Empty when
    /// the gateway never answered.
    pub proposal: String,
    /// True only when `proposal` passed the verifier.
    pub verified: bool,
    /// Gateway calls made.
    pub attempts: usize,
    pub note: String,
}

fn user_message(error: &str, artifact: &str, snippets: &[RetrievedSnippet]) -> String {
    let mut s = format!("Error:\n{error}\n\nReference:\n");
    if snippets.is_empty() {
        s.push_str("(no documentation retrieved)\n");
    }
    for (i, snip) in snippets.iter().enumerate() {
        let _ = writeln!(s, "[{}] {}\n{}", i + 1, snip.source, snip.text);
    }
    let _ = write!(s, "\nArtifact:\n```\n{}\n```", artifact.trim_end());
    s
}

/// Ask for a fix of `artifact`, which was rejected with `error`.
///
/// `verify` parses and checks a proposal; its success value is returned
/// alongside the diagnosis when a proposal passes.
pub fn diagnose<T>(
    error: &str,
    artifact: &str,
    index: &DocIndex,
    embedder: &dyn Embedder,
    gateway: &Gateway,
    cfg: &DebugConfig,
    verify: impl Fn(&str) -> Result<T, String>,
) -> (Diagnosis, Option<T>) {
    let mut notes = Vec::new();
    let snippets = match index.retrieve(embedder, error, cfg.k) {
        Ok(s) => s,
        Err(e) => {
            notes.push(format!("retrieval failed: {e}"));
            Vec::new()
        }
    };
    let mut messages = vec![
        AgentMessage::system(prompts::DEBUGGER),
        AgentMessage::user(user_message(error, artifact, &snippets)),
    ];
    let mut diagnosis = Diagnosis {
        snippets,
        proposal: String::new(),
        verified: false,
        attempts: 0,
        note: String::new(),
    };
    for attempt in 0..=MAX_RETRIES {
        let request = ChatRequest::new(
            DEBUGGER_AGENT,
            &cfg.model,
            messages.clone(),
            &ToolRegistry::new(),
        )
        .with_temperature(cfg.temperature);
        diagnosis.attempts += 1;
        let reply = match gateway.chat(&request) {
            Ok(r) => r,
            Err(e) => {
                notes.push(format!("gateway error: {e}"));
                break;
            }
        };
        diagnosis.proposal = strip_fences(&reply.message.content).to_string();
        match verify(&diagnosis.proposal) {
            Ok(value) => {
                diagnosis.verified = true;
                notes.push(format!("verified after {} attempt(s)", attempt + 1));
                diagnosis.note = notes.join("; ");
                return (diagnosis, Some(value));
            }
            Err(e) => {
                notes.push(format!(
                    "attempt {} rejected: {}",
                    attempt + 1,
                    first_line(&e)
                ));
                messages.push(AgentMessage::assistant(reply.message.content.clone()));
                messages.push(AgentMessage::user(format!(
                    "The corrected artifact is still rejected:\n{e}\nReply with the complete corrected artifact."
                )));
            }
        }
    }
    notes.push("unverified".to_string());
    diagnosis.note = notes.join("; ");
    (diagnosis, None)
}

fn first_line(s: &str) -> &str {
    s.lines().find(|l| !l.trim().is_empty()).unwrap_or_default()
}

/// Verifier for a domain proposal: parses and validates.
pub fn verify_domain(text: &str) -> Result<DomainModel, String> {
    domain_output(text).map_err(|u| u.feedback)
}

/// Verifier for a problem proposal against a fixed domain: parses,
/// validates and grounds.
pub fn verify_problem(text: &str, domain: &DomainModel) -> Result<ProblemInstance, String> {
    let problem =
        pddl::parse_problem(strip_fences(text), domain).map_err(|e| e.render("problem.pddl"))?;
    let report = ir::validate(&problem);
    if !report.is_valid() {
        return Err(format!("the problem is invalid:\n{report}"));
    }
    planner::ground(&problem).map_err(|e| e.to_string())?;
    Ok(problem)
}
