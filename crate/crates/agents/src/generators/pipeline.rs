use adaplan_core::ir::{
    self, apply_edit, Assignment, DomainEdit, DomainModel, EditOutcome, Expr, ObjectDecl,
    ProblemInstance,
};
use adaplan_core::pddl::emit_domain;
use adaplan_core::planner;
use serde::{Deserialize, Serialize};

use super::critic::critic_review;
use super::parse::{self, EditDecision, Unusable};
use super::tools::{
    self, ACTION_MODIFICATION, ASK_USER, MISSING_FLUENT, MISSING_OBJECTS, STORE_MEMORY,
};
use super::user::UserChannel;
use super::{
    AgentRole, Failure, FailureKind, LimitHit, PipelineConfig, PipelineEvent, PipelineResult,
    PipelineStatus, RequestKind, RequestOutcome, UpstreamRequest,
};
use crate::gateway::{
    AgentMessage, ChatRequest, CheckedCall, Embedder, Gateway, GatewayError, ToolCall, ToolRegistry,
};
use crate::memory::{memory_note, ContextBuffer, ProceduralStore};

/// Natural language task for one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub name: String,
    /// Description of the environment, its objects' capabilities and actions.
    #[serde(default)]
    pub domain: String,
    /// The situation: objects and what holds initially.
    pub init: String,
    pub goal: String,
    /// A ready domain. When set, the domain agent does not generate one
    /// but still owns edits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provided_domain: Option<DomainModel>,
}

/// Procedural memory available to the agents.
pub struct Memory<'a> {
    pub store: &'a mut ProceduralStore,
    pub embedder: &'a dyn Embedder,
}

/// Why a stage stopped without output.
enum Halt {
    /// An upstream artifact changed; regenerate from the initial state.
    Restart,
    Limit {
        hit: LimitHit,
        candidate: Option<ProblemInstance>,
    },
    Failed(Failure),
}

impl Halt {
    fn gateway(e: GatewayError) -> Halt {
        let kind = match e {
            GatewayError::CallCeiling(_) => FailureKind::CallCeiling,
            _ => FailureKind::Gateway,
        };
        Halt::Failed(Failure {
            kind,
            message: e.to_string(),
        })
    }
}

enum ToolReply {
    Text(String),
    Restart,
}

/// One run of the three generator agents.
pub struct Pipeline<'a> {
    gateway: &'a Gateway,
    cfg: PipelineConfig,
    memory: Option<Memory<'a>>,
    user: &'a mut dyn UserChannel,
    task: Task,
    domain: DomainModel,
    objects: Vec<ObjectDecl>,
    init: Assignment,
    requests: Vec<UpstreamRequest>,
    events: Vec<PipelineEvent>,
    /// Changes the regenerated agents should know about.
    notes: Vec<String>,
    /// Objects requested by the goal agent, awaiting the initial state.
    object_request: Option<(usize, Vec<ObjectDecl>)>,
}

/// Run the pipeline to completion.
pub fn run_pipeline(
    task: Task,
    cfg: PipelineConfig,
    gateway: &Gateway,
    memory: Option<Memory<'_>>,
    user: &mut dyn UserChannel,
) -> PipelineResult {
    Pipeline::new(task, cfg, gateway, memory, user).run()
}

impl<'a> Pipeline<'a> {
    pub fn new(
        task: Task,
        cfg: PipelineConfig,
        gateway: &'a Gateway,
        memory: Option<Memory<'a>>,
        user: &'a mut dyn UserChannel,
    ) -> Self {
        Pipeline {
            gateway,
            cfg,
            memory,
            user,
            domain: DomainModel::new(&task.name),
            task,
            objects: Vec::new(),
            init: Assignment::default(),
            requests: Vec::new(),
            events: Vec::new(),
            notes: Vec::new(),
            object_request: None,
        }
    }

    fn event(&mut self, agent: &str, event: &str, detail: impl Into<String>) {
        self.events.push(PipelineEvent {
            agent: agent.to_string(),
            event: event.to_string(),
            detail: detail.into(),
        });
    }

    fn partial(&self, goal: Expr) -> ProblemInstance {
        ProblemInstance {
            name: self.task.name.clone(),
            domain: self.domain.clone(),
            objects: self.objects.clone(),
            init: self.init.clone(),
            goal,
        }
    }

    pub fn run(mut self) -> PipelineResult {
        let start = self.gateway.calls();
        let outcome = self.stages();
        let gateway_calls = self.gateway.calls() - start;
        let (status, problem, limit, failure) = match outcome {
            Ok(problem) => (PipelineStatus::Complete, Some(problem), None, None),
            Err(Halt::Limit { hit, candidate }) => (
                PipelineStatus::CorrectionLimitReached,
                candidate,
                Some(hit),
                None,
            ),
            Err(Halt::Failed(f)) => (PipelineStatus::Failed, None, None, Some(f)),
            Err(Halt::Restart) => (
                PipelineStatus::Failed,
                None,
                None,
                Some(Failure {
                    kind: FailureKind::Internal,
                    message: "restart escaped the stage loop".to_string(),
                }),
            ),
        };
        PipelineResult {
            status,
            problem,
            requests: self.requests,
            events: self.events,
            gateway_calls,
            limit,
            failure,
        }
    }

    fn stages(&mut self) -> Result<ProblemInstance, Halt> {
        self.cfg.check().map_err(|message| {
            Halt::Failed(Failure {
                kind: FailureKind::Config,
                message,
            })
        })?;
        match self.task.provided_domain.clone() {
            Some(d) => {
                self.domain = d;
                self.event("domain", "bypassed", "using the provided domain");
            }
            None => self.domain = self.generate_domain()?,
        }
        let mut restarts = 0;
        let goal = loop {
            let restart = match self.generate_initial_state() {
                Ok((objects, init)) => {
                    if let Some((idx, before)) = self.object_request.take() {
                        let added: Vec<ObjectDecl> = objects
                            .iter()
                            .filter(|o| !before.contains(o))
                            .cloned()
                            .collect();
                        if let RequestKind::AddObjects { added: slot, .. } =
                            &mut self.requests[idx].kind
                        {
                            *slot = added;
                        }
                    }
                    self.objects = objects;
                    self.init = init;
                    match self.generate_goal() {
                        Ok(goal) => break goal,
                        Err(Halt::Restart) => true,
                        Err(h) => return Err(h),
                    }
                }
                Err(Halt::Restart) => true,
                Err(h) => return Err(h),
            };
            debug_assert!(restart);
            restarts += 1;
            if restarts > self.cfg.max_restarts {
                return Err(Halt::Failed(Failure {
                    kind: FailureKind::RestartLimit,
                    message: format!(
                        "more than {} regenerations after upstream changes",
                        self.cfg.max_restarts
                    ),
                }));
            }
            self.event(
                "orchestrator",
                "restart",
                format!("regenerating initial state and goal ({restarts})"),
            );
        };
        let problem = self.partial(goal);
        let report = ir::validate(&problem);
        if !report.is_valid() {
            return Err(Halt::Failed(Failure {
                kind: FailureKind::Internal,
                message: format!("final problem is invalid: {report}"),
            }));
        }
        planner::ground(&problem).map_err(|e| {
            Halt::Failed(Failure {
                kind: FailureKind::Internal,
                message: format!("final problem cannot be grounded: {e}"),
            })
        })?;
        Ok(problem)
    }

    fn session(&mut self, role: AgentRole, query: &str) -> Result<ContextBuffer, Halt> {
        let mut buffer = ContextBuffer::new(
            AgentMessage::system(role.system_prompt()),
            self.cfg.context_capacity,
        );
        let Some(memory) = &self.memory else {
            return Ok(buffer);
        };
        let hits = memory
            .store
            .retrieve(
                memory.embedder,
                query,
                self.cfg.memory_k,
                self.cfg.memory_threshold,
            )
            .map_err(|e| {
                Halt::Failed(Failure {
                    kind: FailureKind::Memory,
                    message: e.to_string(),
                })
            })?;
        if hits.is_empty() {
            return Ok(buffer);
        }
        let summaries: Vec<&str> = hits.iter().map(|h| h.entry.summary.as_str()).collect();
        buffer.pin(AgentMessage::system(memory_note(&summaries)));
        let detail = hits
            .iter()
            .map(|h| format!("{:.4} {}", h.score, h.entry.summary))
            .collect::<Vec<_>>()
            .join(" | ");
        self.event(role.label(), "memory-retrieved", detail);
        Ok(buffer)
    }

    fn notes_block(&self) -> String {
        if self.notes.is_empty() {
            return String::new();
        }
        let mut s = String::from("\nChanges since the previous attempt:\n");
        for n in &self.notes {
            s.push_str("- ");
            s.push_str(n);
            s.push('\n');
        }
        s
    }

    /// Generate the domain from the task's domain description.
    fn generate_domain(&mut self) -> Result<DomainModel, Halt> {
        let description = self.task.domain.clone();
        if description.trim().is_empty() {
            return Err(Halt::Failed(Failure {
                kind: FailureKind::Config,
                message: "the task has neither a domain description nor a provided domain"
                    .to_string(),
            }));
        }
        let mut buffer = self.session(AgentRole::Domain, &description)?;
        buffer.append(AgentMessage::user(format!(
            "Domain description:\n{description}\n\nWrite the complete PDDL domain."
        )));
        let name = self.task.name.clone();
        self.converse(
            AgentRole::Domain,
            buffer,
            &ToolRegistry::new(),
            &description,
            |text| {
                parse::domain_output(text).map_err(|u| Unusable {
                    feedback: u.feedback,
                    candidate: u.candidate.map(|domain| ProblemInstance {
                        name: name.clone(),
                        domain,
                        objects: Vec::new(),
                        init: Assignment::default(),
                        goal: Expr::truth(),
                    }),
                })
            },
            emit_domain,
        )
    }

    /// Declare objects and initial facts for the current domain.
    fn generate_initial_state(&mut self) -> Result<(Vec<ObjectDecl>, Assignment), Halt> {
        let description = self.task.init.clone();
        let mut buffer = self.session(AgentRole::InitialState, &description)?;
        buffer.append(AgentMessage::user(format!(
            "Domain:\n```pddl\n{}```\n\nSituation:\n{description}\n{}\nReply with the JSON objects and initial facts.",
            emit_domain(&self.domain),
            self.notes_block(),
        )));
        let domain = self.domain.clone();
        let name = self.task.name.clone();
        self.converse(
            AgentRole::InitialState,
            buffer,
            &tools::init_tools(),
            &description,
            |text| parse::init_output(text, &name, &domain),
            |(objects, init)| parse::render_state(objects, init),
        )
    }

    /// Write the goal for the current domain and initial state.
    fn generate_goal(&mut self) -> Result<Expr, Halt> {
        let description = self.task.goal.clone();
        let mut buffer = self.session(AgentRole::Goal, &description)?;
        buffer.append(AgentMessage::user(format!(
            "Domain:\n```pddl\n{}```\n\n{}\nGoal:\n{description}\n{}\nReply with the JSON goal.",
            emit_domain(&self.domain),
            parse::render_state(&self.objects, &self.init),
            self.notes_block(),
        )));
        let partial = self.partial(Expr::truth());
        self.converse(
            AgentRole::Goal,
            buffer,
            &tools::goal_tools(),
            &description,
            |text| parse::goal_output(text, &partial),
            |g| g.to_string(),
        )
    }

    /// The generation loop shared by all agents: call the model, serve
    /// tool calls, check the output, ask the critic.
    fn converse<T>(
        &mut self,
        role: AgentRole,
        mut buffer: ContextBuffer,
        tools: &ToolRegistry,
        task: &str,
        accept: impl Fn(&str) -> Result<T, Unusable<ProblemInstance>>,
        render: impl Fn(&T) -> String,
    ) -> Result<T, Halt> {
        let label = role.label();
        let mut last_error = "no output was produced".to_string();
        let mut candidate = None;
        let mut rejections = 0;
        for turn in 1..=self.cfg.correction_limit {
            let request = ChatRequest::new(label, &self.cfg.model, buffer.window(), tools)
                .with_temperature(self.cfg.temperature);
            let reply = self.gateway.chat(&request).map_err(Halt::gateway)?;
            buffer.append(reply.message.clone());

            if !reply.calls.is_empty() {
                let names: Vec<&str> = reply.calls.iter().map(|c| c.call().name.as_str()).collect();
                self.event(
                    label,
                    "turn",
                    format!("{turn}: tool calls {}", names.join(", ")),
                );
                for checked in &reply.calls {
                    let text = match checked {
                        CheckedCall::Invalid { error, .. } => {
                            last_error = error.to_string();
                            format!("error: {error}")
                        }
                        CheckedCall::Valid(call) => match self.handle_tool(role, call)? {
                            ToolReply::Text(t) => t,
                            ToolReply::Restart => return Err(Halt::Restart),
                        },
                    };
                    buffer.append(AgentMessage::tool_result(&checked.call().id, text));
                }
                continue;
            }

            let value = match accept(&reply.message.content) {
                Ok(v) => v,
                Err(u) => {
                    self.event(
                        label,
                        "turn",
                        format!("{turn}: unusable output: {}", first_line(&u.feedback)),
                    );
                    last_error = u.feedback.clone();
                    if u.candidate.is_some() {
                        candidate = u.candidate;
                    }
                    buffer.append(AgentMessage::user(format!(
                        "Your output could not be used: {}\nFix it and reply again.",
                        u.feedback
                    )));
                    continue;
                }
            };
            self.event(label, "turn", format!("{turn}: output produced"));
            if self.cfg.critic {
                let rendered = render(&value);
                let verdict = critic_review(
                    self.gateway,
                    &self.cfg.model,
                    self.cfg.temperature,
                    task,
                    &rendered,
                    self.cfg.tau,
                )
                .map_err(Halt::gateway)?;
                if !verdict.accepted {
                    rejections += 1;
                    self.event(
                        label,
                        "critic-rejected",
                        format!("score {}: {}", verdict.score, first_line(&verdict.feedback)),
                    );
                    if rejections >= self.cfg.critic_iterations {
                        self.event(
                            label,
                            "critic-limit",
                            format!("{rejections} rejections; proceeding with the latest response"),
                        );
                        return Ok(value);
                    }
                    buffer.append(AgentMessage::user(format!(
                        "A reviewer rejected this output (score {}):\n{}\nRevise it and reply again.",
                        verdict.score, verdict.feedback
                    )));
                    continue;
                }
                self.event(label, "critic-accepted", format!("score {}", verdict.score));
            }
            return Ok(value);
        }
        Err(Halt::Limit {
            hit: LimitHit {
                agent: role,
                turns: self.cfg.correction_limit,
                last_error,
            },
            candidate,
        })
    }

    fn handle_tool(&mut self, role: AgentRole, call: &ToolCall) -> Result<ToolReply, Halt> {
        let arg = |name: &str| call.arg(name).unwrap_or_default();
        match call.name.as_str() {
            ASK_USER => {
                let question = arg("question");
                match self.user.ask(&question) {
                    Ok(answer) => {
                        self.gateway.record_answer(&question, &answer);
                        self.requests.push(UpstreamRequest {
                            origin: role,
                            target: "user".to_string(),
                            kind: RequestKind::UserQuery {
                                question,
                                answer: Some(answer.clone()),
                            },
                            outcome: RequestOutcome::Answered,
                        });
                        Ok(ToolReply::Text(answer))
                    }
                    Err(e) => {
                        self.requests.push(UpstreamRequest {
                            origin: role,
                            target: "user".to_string(),
                            kind: RequestKind::UserQuery {
                                question,
                                answer: None,
                            },
                            outcome: RequestOutcome::Unanswered(e.to_string()),
                        });
                        Err(Halt::Failed(Failure {
                            kind: FailureKind::Interaction,
                            message: e.to_string(),
                        }))
                    }
                }
            }
            STORE_MEMORY => {
                let summary = arg("summary");
                let Some(memory) = &mut self.memory else {
                    return Ok(ToolReply::Text(
                        "memory is not available in this run; nothing was stored".to_string(),
                    ));
                };
                match memory.store.store(memory.embedder, &summary, role.label()) {
                    Ok(_) => {
                        self.event(role.label(), "memory-stored", summary);
                        Ok(ToolReply::Text("stored".to_string()))
                    }
                    Err(crate::memory::MemoryError::EmptySummary) => {
                        Ok(ToolReply::Text("error: the summary is empty".to_string()))
                    }
                    Err(e) => Err(Halt::Failed(Failure {
                        kind: FailureKind::Memory,
                        message: e.to_string(),
                    })),
                }
            }
            MISSING_FLUENT | ACTION_MODIFICATION => self.route_to_domain(role, call),
            MISSING_OBJECTS => {
                let (object_type, object_description) =
                    (arg("object_type"), arg("object_description"));
                self.notes.push(format!(
                    "The goal agent reports missing objects of type {object_type}: {object_description}"
                ));
                self.requests.push(UpstreamRequest {
                    origin: role,
                    target: "init".to_string(),
                    kind: RequestKind::AddObjects {
                        object_type,
                        object_description,
                        added: Vec::new(),
                    },
                    outcome: RequestOutcome::Applied,
                });
                self.object_request = Some((self.requests.len() - 1, self.objects.clone()));
                Ok(ToolReply::Restart)
            }
            other => Ok(ToolReply::Text(format!(
                "error: tool `{other}` is not handled"
            ))),
        }
    }

    /// Ask the domain agent to apply or reject a requested change.
    fn route_to_domain(&mut self, origin: AgentRole, call: &ToolCall) -> Result<ToolReply, Halt> {
        let label = AgentRole::Domain.label();
        let provenance = format!("{}:{}", origin.label(), call.name);
        let arguments = serde_json::to_string_pretty(&call.arguments).expect("arguments serialize");
        let mut buffer = ContextBuffer::new(
            AgentMessage::system(AgentRole::Domain.system_prompt()),
            self.cfg.context_capacity,
        );
        buffer.append(AgentMessage::user(format!(
            "Current domain:\n```pddl\n{}```\n\nThe {} agent called `{}` with arguments:\n{arguments}\n\n\
             Decide whether the domain needs this change. Reply with {{\"edits\": [...]}} or {{\"reject\": \"reason\"}}.",
            emit_domain(&self.domain),
            origin.label(),
            call.name,
        )));
        let record = |p: &mut Self, edits: Vec<DomainEdit>, outcome: RequestOutcome| {
            p.requests.push(UpstreamRequest {
                origin,
                target: label.to_string(),
                kind: RequestKind::DomainEdit {
                    tool: call.name.clone(),
                    arguments: call.arguments.clone(),
                    edits,
                },
                outcome,
            });
        };
        let mut last_error = String::new();
        for turn in 1..=self.cfg.correction_limit {
            let request = ChatRequest::new(
                label,
                &self.cfg.model,
                buffer.window(),
                &ToolRegistry::new(),
            )
            .with_temperature(self.cfg.temperature);
            let reply = self.gateway.chat(&request).map_err(Halt::gateway)?;
            buffer.append(reply.message.clone());
            let feedback = match parse::edit_output(&reply.message.content) {
                Err(u) => u.feedback,
                Ok(EditDecision::Reject(reason)) => {
                    self.event(label, "turn", format!("{turn}: rejected {provenance}"));
                    record(self, Vec::new(), RequestOutcome::Rejected(reason.clone()));
                    return Ok(ToolReply::Text(format!(
                        "rejected by the domain agent: {reason}"
                    )));
                }
                Ok(EditDecision::Apply(kinds)) => {
                    let edits: Vec<DomainEdit> = kinds
                        .into_iter()
                        .map(|k| DomainEdit::new(k, &provenance))
                        .collect();
                    match self.try_edits(&edits) {
                        Ok(Ok(domain)) => {
                            self.event(label, "turn", format!("{turn}: applied {provenance}"));
                            self.domain = domain;
                            self.notes.push(format!(
                                "The domain was changed at the request of the {} agent ({}).",
                                origin.label(),
                                call.name
                            ));
                            record(self, edits, RequestOutcome::Applied);
                            return Ok(ToolReply::Restart);
                        }
                        Ok(Err(reason)) => {
                            self.event(label, "turn", format!("{turn}: edit rejected: {reason}"));
                            record(self, edits, RequestOutcome::Rejected(reason.clone()));
                            return Ok(ToolReply::Text(format!("rejected: {reason}")));
                        }
                        Err(feedback) => feedback,
                    }
                }
            };
            self.event(
                label,
                "turn",
                format!("{turn}: unusable edit: {}", first_line(&feedback)),
            );
            last_error = feedback.clone();
            buffer.append(AgentMessage::user(format!(
                "Your reply could not be used: {feedback}\nReply again."
            )));
        }
        Err(Halt::Limit {
            hit: LimitHit {
                agent: AgentRole::Domain,
                turns: self.cfg.correction_limit,
                last_error,
            },
            candidate: None,
        })
    }

    /// Apply edits in order, all or nothing. The outer error is feedback
    /// for a malformed reply; the inner one a rejection.
    fn try_edits(&self, edits: &[DomainEdit]) -> Result<Result<DomainModel, String>, String> {
        let mut domain = self.domain.clone();
        for (i, edit) in edits.iter().enumerate() {
            let result = apply_edit(&domain, &self.objects, edit)
                .map_err(|e| format!("edit {} failed: {e}", i + 1))?;
            match result.outcome {
                EditOutcome::Applied => domain = result.domain,
                EditOutcome::Rejected(reason) => return Ok(Err(reason)),
            }
        }
        let report = ir::validate_domain(&domain);
        if !report.is_valid() {
            return Err(format!("the edited domain is invalid: {report}"));
        }
        Ok(Ok(domain))
    }
}

fn first_line(s: &str) -> &str {
    s.lines().next().unwrap_or_default()
}
