//! Executing translated plans with skills, and validating the result.
//!
//! The executor agent takes one instruction at a time and works toward it
//! in a reason-then-act loop: each turn it may call one skill and sees the
//! observation, until it replies without a call to say the instruction is
//! done. The validator agent then reads the log and the final state and
//! decides whether the goal is met, whether to run the instructions again
//! with corrective feedback, or whether to give up and tell the user. A
//! goal-met decision also requires the environment's own goal check.

mod env;

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use adaplan_core::ir::Expr;
use serde::{Deserialize, Serialize};

use crate::abstraction::{Instruction, InstructionList};
use crate::gateway::{
    AgentMessage, ChatRequest, CheckedCall, Gateway, ToolError, ToolRegistry, DEFAULT_TEMPERATURE,
};
use crate::generators::{prompts, strip_fences};

pub use env::{household_skills, Environment, Observation, TextWorldEnv};

pub const EXECUTOR_AGENT: &str = "executor";
pub const VALIDATOR_AGENT: &str = "validator";
/// Reasoning turns per instruction.
pub const DEFAULT_STEP_BUDGET: usize = 6;
/// Validator-requested re-runs per plan.
pub const DEFAULT_RETRY_BUDGET: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutorConfig {
    pub model: String,
    pub temperature: f64,
    pub step_budget: usize,
    pub retry_budget: usize,
}

impl Default for ExecutorConfig {
    fn default() -> Self {
        ExecutorConfig {
            model: "gpt-4o".to_string(),
            temperature: DEFAULT_TEMPERATURE,
            step_budget: DEFAULT_STEP_BUDGET,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkillInvocation {
    pub skill: String,
    pub args: Vec<String>,
}

impl fmt::Display for SkillInvocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.skill, self.args.join(", "))
    }
}

/// One executor turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    /// 1-based index of the instruction being worked on.
    pub instruction: usize,
    pub thought: String,
    /// The skill dispatched this turn, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invocation: Option<SkillInvocation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<Observation>,
    /// Why the turn's tool call was not dispatched.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", content = "detail", rename_all = "kebab-case")]
pub enum StepFailure {
    Budget,
    UnknownSkill(String),
    Gateway(String),
}

impl fmt::Display for StepFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepFailure::Budget => f.write_str("step budget exhausted"),
            StepFailure::UnknownSkill(s) => write!(f, "unknown skill `{s}` requested twice"),
            StepFailure::Gateway(e) => write!(f, "gateway error: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum StepOutcome {
    Done,
    Failed { failure: StepFailure },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ExecutionStatus {
    Completed,
    /// Stopped at the 1-based instruction `index`.
    StoppedAt {
        index: usize,
        failure: StepFailure,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionLog {
    pub records: Vec<LogRecord>,
    pub status: ExecutionStatus,
}

impl ExecutionLog {
    /// Every dispatched skill, in order.
    pub fn invocations(&self) -> impl Iterator<Item = &SkillInvocation> {
        self.records.iter().filter_map(|r| r.invocation.as_ref())
    }

    /// Plain text rendering for the validator and for users.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let _ = write!(s, "[{}] ", r.instruction);
            match (&r.invocation, &r.observation, &r.rejected) {
                (Some(inv), Some(obs), _) => {
                    let tag = if obs.success { "ok" } else { "failed" };
                    let _ = writeln!(s, "{inv} -> {tag}: {}", obs.text);
                }
                (_, _, Some(why)) => {
                    let _ = writeln!(s, "not executed: {why}");
                }
                _ => {
                    let _ = writeln!(s, "done: {}", r.thought.trim());
                }
            }
        }
        match &self.status {
            ExecutionStatus::Completed => s.push_str("status: completed\n"),
            ExecutionStatus::StoppedAt { index, failure } => {
                let _ = writeln!(s, "status: stopped at instruction {index}: {failure}");
            }
        }
        s
    }
}

fn step_message(instruction: &Instruction, feedback: Option<&str>, state: &str) -> String {
    let mut s = String::new();
    if let Some(f) = feedback {
        let _ = writeln!(s, "Feedback from the previous attempt: {f}\n");
    }
    let mut step = instruction.step.action.clone();
    for a in &instruction.step.args {
        step.push(' ');
        step.push_str(a);
    }
    let _ = write!(
        s,
        "Instruction {}: {}\nPlan step: ({step})\n\nCurrent state:\n{state}",
        instruction.index, instruction.text
    );
    s
}

/// Work on one instruction until the agent declares it done or the step
/// budget runs out. Records are appended to `log`.
pub fn execute_step(
    instruction: &Instruction,
    env: &mut dyn Environment,
    gateway: &Gateway,
    cfg: &ExecutorConfig,
    feedback: Option<&str>,
    log: &mut Vec<LogRecord>,
) -> StepOutcome {
    let fail = |failure| StepOutcome::Failed { failure };
    let skills = match ToolRegistry::from_tools(env.skills()) {
        Ok(r) => r,
        Err(e) => return fail(StepFailure::Gateway(e.to_string())),
    };
    let mut messages = vec![
        AgentMessage::system(prompts::EXECUTOR),
        AgentMessage::user(step_message(instruction, feedback, &env.describe())),
    ];
    let mut unknown_seen = false;
    for _ in 0..cfg.step_budget.max(1) {
        let request = ChatRequest::new(EXECUTOR_AGENT, &cfg.model, messages.clone(), &skills)
            .with_temperature(cfg.temperature);
        let reply = match gateway.chat(&request) {
            Ok(r) => r,
            Err(e) => return fail(StepFailure::Gateway(e.to_string())),
        };
        let thought = reply.message.content.clone();
        let Some(first) = reply.calls.first() else {
            log.push(LogRecord {
                instruction: instruction.index,
                thought,
                invocation: None,
                observation: None,
                rejected: None,
            });
            return StepOutcome::Done;
        };
        messages.push(reply.message.clone());
        let mut record = LogRecord {
            instruction: instruction.index,
            thought,
            invocation: None,
            observation: None,
            rejected: None,
        };
        let result = match first {
            CheckedCall::Invalid {
                call,
                error: ToolError::Unknown(name),
            } => {
                if unknown_seen {
                    record.rejected = Some(format!("unknown skill `{name}`"));
                    log.push(record);
                    return fail(StepFailure::UnknownSkill(name.clone()));
                }
                unknown_seen = true;
                let available: Vec<&str> =
                    skills.schemas().iter().map(|t| t.name.as_str()).collect();
                let why = format!(
                    "unknown skill `{}`; available skills: {}",
                    call.name,
                    available.join(", ")
                );
                record.rejected = Some(why.clone());
                why
            }
            CheckedCall::Invalid { error, .. } => {
                let why = error.to_string();
                record.rejected = Some(why.clone());
                why
            }
            CheckedCall::Valid(call) => {
                let schema = skills
                    .get(&call.name)
                    .expect("validated call names a registered skill");
                let args: Vec<String> = schema
                    .parameters
                    .iter()
                    .map(|p| call.arg(&p.name).unwrap_or_default())
                    .collect();
                let invocation = SkillInvocation {
                    skill: call.name.clone(),
                    args: args.clone(),
                };
                match env.apply(&call.name, &args) {
                    Ok(obs) => {
                        let text = format!("{}\n\nCurrent state:\n{}", obs.text, env.describe());
                        record.invocation = Some(invocation);
                        record.observation = Some(obs);
                        text
                    }
                    Err(why) => {
                        record.rejected = Some(why.clone());
                        why
                    }
                }
            }
        };
        log.push(record);
        messages.push(AgentMessage::tool_result(&first.call().id, result));
        for extra in &reply.calls[1..] {
            messages.push(AgentMessage::tool_result(
                &extra.call().id,
                "Not executed: call one skill per turn.",
            ));
        }
    }
    fail(StepFailure::Budget)
}

/// Execute instructions in order, stopping at the first failed one.
pub fn execute_plan(
    instructions: &InstructionList,
    env: &mut dyn Environment,
    gateway: &Gateway,
    cfg: &ExecutorConfig,
    feedback: Option<&str>,
) -> ExecutionLog {
    let mut records = Vec::new();
    for ins in &instructions.instructions {
        if let StepOutcome::Failed { failure } =
            execute_step(ins, env, gateway, cfg, feedback, &mut records)
        {
            return ExecutionLog {
                records,
                status: ExecutionStatus::StoppedAt {
                    index: ins.index,
                    failure,
                },
            };
        }
    }
    ExecutionLog {
        records,
        status: ExecutionStatus::Completed,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", content = "feedback", rename_all = "kebab-case")]
pub enum ValidatorVerdict {
    GoalMet,
    Retry(String),
    /// Carries the text shown to the user.
    Abort(String),
}

#[derive(Deserialize)]
struct VerdictReply {
    decision: String,
    #[serde(default)]
    feedback: String,
}

/// Decide on one execution attempt. `retries_left` is the number of
/// re-runs still allowed; at zero a retry becomes an abort.
pub fn validate_execution(
    log: &ExecutionLog,
    goal: &Expr,
    env: &dyn Environment,
    gateway: &Gateway,
    cfg: &ExecutorConfig,
    retries_left: usize,
) -> ValidatorVerdict {
    let holds = env.check_goal(goal);
    let messages = vec![
        AgentMessage::system(prompts::VALIDATOR),
        AgentMessage::user(format!(
            "Goal:\n{goal}\n\nExecution log:\n{}\nFinal state:\n{}",
            log.render(),
            env.describe()
        )),
    ];
    let request = ChatRequest::new(VALIDATOR_AGENT, &cfg.model, messages, &ToolRegistry::new())
        .with_temperature(cfg.temperature);
    let reply = match gateway.chat(&request) {
        Ok(r) => r,
        Err(e) => {
            return ValidatorVerdict::Abort(format!("The validator could not be consulted: {e}"))
        }
    };
    let parsed: Option<VerdictReply> =
        serde_json::from_str(strip_fences(&reply.message.content)).ok();
    let (decision, feedback) = match parsed {
        Some(v) => (v.decision.trim().to_ascii_lowercase(), v.feedback),
        // An unreadable verdict is treated as a request to try again.
        None => (
            "retry".to_string(),
            reply.message.content.trim().to_string(),
        ),
    };
    let retry = |feedback: String| {
        if retries_left == 0 {
            ValidatorVerdict::Abort(format!(
                "Execution did not reach the goal and no retries are left. {feedback}"
            ))
        } else {
            ValidatorVerdict::Retry(feedback)
        }
    };
    match decision.as_str() {
        "goal-met" | "goal_met" => match holds {
            Ok(true) => ValidatorVerdict::GoalMet,
            Ok(false) => retry(format!(
                "The goal {goal} does not hold in the environment. {feedback}"
            )),
            Err(e) => ValidatorVerdict::Abort(format!(
                "The goal cannot be checked in this environment: {e}"
            )),
        },
        "abort" => ValidatorVerdict::Abort(feedback),
        _ => retry(feedback),
    }
}

/// All attempts of one execution run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub attempts: Vec<ExecutionLog>,
    pub verdicts: Vec<ValidatorVerdict>,
    /// The environment's goal check after the last attempt.
    pub goal_holds: bool,
}

impl ExecutionReport {
    pub fn final_verdict(&self) -> &ValidatorVerdict {
        self.verdicts.last().expect("at least one verdict")
    }
}

/// Execute, validate, and re-execute with feedback until the validator
/// accepts or gives up.
pub fn run_execution(
    instructions: &InstructionList,
    goal: &Expr,
    env: &mut dyn Environment,
    gateway: &Gateway,
    cfg: &ExecutorConfig,
) -> ExecutionReport {
    let mut report = ExecutionReport {
        attempts: Vec::new(),
        verdicts: Vec::new(),
        goal_holds: false,
    };
    let mut retries_left = cfg.retry_budget;
    let mut feedback: Option<String> = None;
    loop {
        let log = execute_plan(instructions, env, gateway, cfg, feedback.as_deref());
        let verdict = validate_execution(&log, goal, env, gateway, cfg, retries_left);
        report.attempts.push(log);
        report.verdicts.push(verdict.clone());
        match verdict {
            ValidatorVerdict::Retry(f) => {
                retries_left -= 1;
                feedback = Some(f);
            }
            _ => break,
        }
    }
    report.goal_holds = env.check_goal(goal).unwrap_or(false);
    report
}

/// Skills named in a log that the environment does not offer. Always
/// empty for logs produced by this module.
pub fn unregistered_invocations<'a>(
    log: &'a ExecutionLog,
    env: &dyn Environment,
) -> Vec<&'a SkillInvocation> {
    let names: BTreeSet<String> = env.skills().into_iter().map(|t| t.name).collect();
    log.invocations()
        .filter(|i| !names.contains(&i.skill))
        .collect()
}
