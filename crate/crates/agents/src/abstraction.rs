//! Translation of a solver plan into short natural language instructions.
//!
//! With a gateway the model writes one numbered instruction per step and
//! may leave out bookkeeping parameters. A reply with the wrong number of
//! instructions is sent back once; if the second reply is also unusable,
//! or no gateway is given, a fixed template is used instead. Every
//! instruction keeps its source step, so the exact ground arguments are
//! always recoverable whatever the text says.

use std::fmt;
use std::fmt::Write as _;

use adaplan_core::ir::DomainModel;
use adaplan_core::planner::{Plan, PlanStep};
use serde::{Deserialize, Serialize};

use crate::gateway::{AgentMessage, ChatRequest, Gateway, ToolRegistry, DEFAULT_TEMPERATURE};
use crate::generators::prompts;

pub const ABSTRACTION_AGENT: &str = "abstraction";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractionConfig {
    pub model: String,
    pub temperature: f64,
}

impl Default for AbstractionConfig {
    fn default() -> Self {
        AbstractionConfig {
            model: "gpt-4o".to_string(),
            temperature: DEFAULT_TEMPERATURE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instruction {
    /// 1-based position in the plan.
    pub index: usize,
    pub text: String,
    pub step: PlanStep,
    /// The step names an action the domain does not declare, or uses the
    /// wrong number of arguments; its text is the step itself.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unknown: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TranslationMethod {
    Llm,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstructionList {
    pub instructions: Vec<Instruction>,
    pub method: TranslationMethod,
    /// Why the fallback was used, if it was.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl InstructionList {
    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn texts(&self) -> Vec<&str> {
        self.instructions.iter().map(|i| i.text.as_str()).collect()
    }
}

/// The numbered layout shown to users: `1. Pick up b1.`
impl fmt::Display for InstructionList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instructions {
            writeln!(f, "{}. {}", i.index, i.text)?;
        }
        Ok(())
    }
}

fn is_known(step: &PlanStep, domain: &DomainModel) -> bool {
    domain
        .actions
        .iter()
        .any(|a| a.name == step.action && a.parameters.len() == step.args.len())
}

/// Template sentence for a step: hyphens and underscores in the action
/// name become spaces, the first letter is capitalized, the arguments
/// follow in order and a period ends the sentence.
pub fn fallback_text(step: &PlanStep) -> String {
    let words = step.action.replace(['-', '_'], " ");
    let mut text = String::new();
    let mut chars = words.chars();
    if let Some(c) = chars.next() {
        text.extend(c.to_uppercase());
        text.push_str(chars.as_str());
    }
    for a in &step.args {
        text.push(' ');
        text.push_str(a);
    }
    text.push('.');
    text
}

fn verbatim(step: &PlanStep) -> String {
    let mut s = format!("({}", step.action);
    for a in &step.args {
        s.push(' ');
        s.push_str(a);
    }
    s.push(')');
    s
}

fn assemble(
    plan: &Plan,
    domain: &DomainModel,
    texts: Vec<String>,
    method: TranslationMethod,
    note: String,
) -> InstructionList {
    let instructions = plan
        .steps
        .iter()
        .zip(texts)
        .enumerate()
        .map(|(i, (step, text))| {
            let unknown = !is_known(step, domain);
            Instruction {
                index: i + 1,
                text: if unknown { verbatim(step) } else { text },
                step: step.clone(),
                unknown,
            }
        })
        .collect();
    InstructionList {
        instructions,
        method,
        note,
    }
}

/// Deterministic translation with no model involved.
pub fn fallback(plan: &Plan, domain: &DomainModel) -> InstructionList {
    let texts = plan.steps.iter().map(fallback_text).collect();
    assemble(
        plan,
        domain,
        texts,
        TranslationMethod::Fallback,
        String::new(),
    )
}

/// Read a numbered list. Lines that do not start with `N.` or `N)` are
/// ignored; numbering must run 1, 2, … without gaps.
pub fn parse_numbered(text: &str) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        let digits = line.len() - line.trim_start_matches(|c: char| c.is_ascii_digit()).len();
        if digits == 0 {
            continue;
        }
        let rest = &line[digits..];
        let Some(body) = rest.strip_prefix(['.', ')']) else {
            continue;
        };
        let n: usize = line[..digits]
            .parse()
            .map_err(|_| format!("bad number in `{line}`"))?;
        if n != out.len() + 1 {
            return Err(format!(
                "instruction {n} is out of sequence; expected {}",
                out.len() + 1
            ));
        }
        let body = body.trim();
        if body.is_empty() {
            return Err(format!("instruction {n} is empty"));
        }
        out.push(body.to_string());
    }
    Ok(out)
}

fn user_message(plan: &Plan, domain: &DomainModel) -> String {
    let mut s = String::from("Actions:\n");
    let mut used: Vec<&str> = plan.steps.iter().map(|p| p.action.as_str()).collect();
    used.sort_unstable();
    used.dedup();
    for name in used {
        if let Some(a) = domain.actions.iter().find(|a| a.name == name) {
            let params: Vec<String> = a
                .parameters
                .iter()
                .map(|p| format!("?{} - {}", p.name, p.ty))
                .collect();
            let _ = writeln!(s, "- {}({})", a.name, params.join(", "));
        }
    }
    s.push_str("\nPlan:\n");
    for (i, step) in plan.steps.iter().enumerate() {
        let _ = writeln!(s, "{}. {}", i + 1, verbatim(step));
    }
    let _ = write!(
        s,
        "\nWrite exactly {} numbered instructions.",
        plan.steps.len()
    );
    s
}

/// Translate `plan` into one instruction per step. Never fails: without a
/// gateway, or when the model's replies cannot be used, the template is
/// applied.
pub fn translate_plan(
    plan: &Plan,
    domain: &DomainModel,
    gateway: Option<&Gateway>,
    cfg: &AbstractionConfig,
) -> InstructionList {
    let Some(gateway) = gateway else {
        return fallback(plan, domain);
    };
    if plan.steps.is_empty() {
        return fallback(plan, domain);
    }
    let mut messages = vec![
        AgentMessage::system(prompts::ABSTRACTION),
        AgentMessage::user(user_message(plan, domain)),
    ];
    let mut last_problem = String::new();
    for _ in 0..2 {
        let request = ChatRequest::new(
            ABSTRACTION_AGENT,
            &cfg.model,
            messages.clone(),
            &ToolRegistry::new(),
        )
        .with_temperature(cfg.temperature);
        let reply = match gateway.chat(&request) {
            Ok(r) => r,
            Err(e) => {
                last_problem = format!("gateway error: {e}");
                break;
            }
        };
        let problem = match parse_numbered(&reply.message.content) {
            Ok(texts) if texts.len() == plan.steps.len() => {
                return assemble(plan, domain, texts, TranslationMethod::Llm, String::new());
            }
            Ok(texts) => format!(
                "expected {} instructions, got {}",
                plan.steps.len(),
                texts.len()
            ),
            Err(e) => e,
        };
        messages.push(AgentMessage::assistant(reply.message.content.clone()));
        messages.push(AgentMessage::user(format!(
            "That list cannot be used: {problem}. Write exactly {} numbered instructions, one per plan step.",
            plan.steps.len()
        )));
        last_problem = problem;
    }
    let mut list = fallback(plan, domain);
    list.note = last_problem;
    list
}
