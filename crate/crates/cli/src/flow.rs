//! The planning and execution flows shared by `plan`, `execute`, `run`
//! and `scenario`.

use std::path::Path;

use adaplan_agents::abstraction::{translate_plan, InstructionList};
use adaplan_agents::debugger::{diagnose, verify_domain, verify_problem, Diagnosis, DocIndex};
use adaplan_agents::executor::{run_execution, ExecutionReport, TextWorldEnv, ValidatorVerdict};
use adaplan_agents::gateway::{Embedder, HashedBow};
use adaplan_agents::generators::{
    run_pipeline, AgentRole, FailureKind, Memory, PipelineResult, PipelineStatus, Task,
};
use adaplan_agents::memory::ProceduralStore;
use adaplan_core::ir::{Expr, ProblemInstance};
use adaplan_core::pddl::{emit_domain, emit_problem};
use adaplan_core::planner::{ground, solve, validate_plan, Outcome, Plan, Verdict};
use adaplan_core::world::WorldState;
use serde_json::json;

use crate::config::{Config, Mode};
use crate::exit::{Exit, RunRecord};
use crate::rundir::RunDir;
use crate::session::Session;

/// Timestamp given to preloaded memory entries so that runs are
/// reproducible.
pub const PRELOAD_TIME: &str = "1970-01-01T00:00:00Z";
pub const PRELOAD_SOURCE: &str = "scenario";

/// A command that ended early.
#[derive(Debug, Clone, PartialEq)]
pub struct Stop {
    pub exit: Exit,
    pub message: String,
}

impl Stop {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        Stop {
            exit,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Stop::new(Exit::Config, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Stop::new(Exit::Internal, message)
    }
}

/// Shared state of one command.
pub struct Context<'a> {
    pub config: &'a Config,
    pub data_dir: &'a Path,
    pub session: &'a mut Session,
    pub store: &'a mut ProceduralStore,
    pub embedder: &'a HashedBow,
}

/// Open the configured memory store, or an in-memory one holding
/// `preload`.
pub fn open_store(
    config: &Config,
    embedder: &dyn Embedder,
    preload: &[String],
) -> Result<ProceduralStore, Stop> {
    match &config.memory.store {
        Some(path) => {
            ProceduralStore::open(path, embedder).map_err(|e| Stop::config(e.to_string()))
        }
        None => {
            let mut store = ProceduralStore::in_memory(embedder);
            for summary in preload {
                store
                    .store_at(embedder, summary, PRELOAD_SOURCE, PRELOAD_TIME)
                    .map_err(|e| Stop::config(format!("memory preload: {e}")))?;
            }
            Ok(store)
        }
    }
}

/// What a successful planning flow produced.
#[derive(Debug, Clone)]
pub struct Planned {
    pub problem: ProblemInstance,
    pub plan: Plan,
    pub instructions: InstructionList,
}

fn failure_exit(kind: FailureKind, mode: Mode) -> Exit {
    match kind {
        FailureKind::Config => Exit::Config,
        FailureKind::Internal => Exit::Internal,
        // A replayed backend can only fail by diverging from its fixture.
        FailureKind::Gateway if mode == Mode::Replay => Exit::Internal,
        _ => Exit::Generation,
    }
}

fn io(e: String) -> Stop {
    Stop::internal(e)
}

fn doc_index(cx: &Context<'_>) -> Result<DocIndex, Stop> {
    let dir = cx
        .config
        .debugger
        .docs
        .clone()
        .unwrap_or_else(|| cx.data_dir.join("docs"));
    DocIndex::from_dir(&dir, cx.embedder)
        .map_err(|e| Stop::config(format!("documentation index: {e}")))
}

fn run_generation(cx: &mut Context<'_>, task: Task) -> PipelineResult {
    let memory = Memory {
        store: &mut *cx.store,
        embedder: cx.embedder,
    };
    run_pipeline(
        task,
        cx.config.pipeline(),
        &cx.session.gateway,
        Some(memory),
        cx.session.user.as_mut(),
    )
}

/// Repair an artifact left by the correction limit. Returns the final
/// problem on success.
fn repair(
    cx: &mut Context<'_>,
    task: &Task,
    result: &PipelineResult,
    run: &mut RunDir,
) -> Result<ProblemInstance, Stop> {
    let hit = result
        .limit
        .as_ref()
        .expect("limit is set when the limit is reached");
    let limit_msg = format!(
        "the {} agent reached its correction limit after {} turns: {}",
        hit.agent.label(),
        hit.turns,
        hit.last_error
    );
    let Some(candidate) = result.problem.clone() else {
        return Err(Stop::new(
            Exit::Generation,
            format!("{limit_msg}; no candidate to repair"),
        ));
    };
    if !cx.config.debugger.enabled || hit.agent == AgentRole::InitialState {
        return Err(Stop::new(Exit::Generation, limit_msg));
    }
    let index = doc_index(cx)?;
    let debug = cx.config.debug();
    let gateway = &cx.session.gateway;
    let (diagnosis, fixed): (Diagnosis, Option<ProblemInstance>) = match hit.agent {
        AgentRole::Goal => {
            let domain = candidate.domain.clone();
            diagnose(
                &hit.last_error,
                &emit_problem(&candidate),
                &index,
                cx.embedder,
                gateway,
                &debug,
                |t| verify_problem(t, &domain),
            )
        }
        _ => {
            let (diagnosis, domain) = diagnose(
                &hit.last_error,
                &emit_domain(&candidate.domain),
                &index,
                cx.embedder,
                gateway,
                &debug,
                verify_domain,
            );
            run.write_json("debug.json", &diagnosis).map_err(io)?;
            let Some(domain) = domain else {
                return Err(Stop::new(
                    Exit::Generation,
                    format!("{limit_msg}; the repair was {}", diagnosis.note),
                ));
            };
            let mut bypass = task.clone();
            bypass.provided_domain = Some(domain);
            let rerun = run_generation(cx, bypass);
            run.write("pipeline-repaired.json", &rerun.to_json())
                .map_err(io)?;
            return match rerun.status {
                PipelineStatus::Complete => {
                    Ok(rerun.problem.expect("complete pipelines carry a problem"))
                }
                _ => Err(generation_stop(&rerun, cx.session.mode())),
            };
        }
    };
    run.write_json("debug.json", &diagnosis).map_err(io)?;
    fixed.ok_or_else(|| {
        Stop::new(
            Exit::Generation,
            format!("{limit_msg}; the repair was {}", diagnosis.note),
        )
    })
}

fn generation_stop(result: &PipelineResult, mode: Mode) -> Stop {
    match (&result.failure, &result.limit) {
        (Some(f), _) => Stop::new(failure_exit(f.kind, mode), f.message.clone()),
        (None, Some(hit)) => Stop::new(
            Exit::Generation,
            format!(
                "the {} agent reached its correction limit after {} turns: {}",
                hit.agent.label(),
                hit.turns,
                hit.last_error
            ),
        ),
        (None, None) => Stop::internal("generation stopped without a reason"),
    }
}

/// Generate, repair if needed, solve, validate and translate.
pub fn plan(cx: &mut Context<'_>, task: Task, run: &mut RunDir) -> Result<Planned, Stop> {
    let result = run_generation(cx, task.clone());
    run.write("pipeline.json", &result.to_json()).map_err(io)?;
    let problem = match result.status {
        PipelineStatus::Complete => result
            .problem
            .clone()
            .expect("complete pipelines carry a problem"),
        PipelineStatus::CorrectionLimitReached => repair(cx, &task, &result, run)?,
        PipelineStatus::Failed => return Err(generation_stop(&result, cx.session.mode())),
    };
    run.write("domain.pddl", &emit_domain(&problem.domain))
        .map_err(io)?;
    run.write("problem.pddl", &emit_problem(&problem))
        .map_err(io)?;
    run.write_json("problem.json", &problem).map_err(io)?;

    let task_g = ground(&problem)
        .map_err(|e| Stop::internal(format!("the problem cannot be grounded: {e}")))?;
    let report = solve(&task_g, &cx.config.solver);
    run.write_json("solve.json", &report).map_err(io)?;
    let plan = match report.outcome {
        Outcome::Plan(p) => p,
        Outcome::Unsolvable => {
            return Err(Stop::new(
                Exit::Unsolvable,
                format!("no plan reaches the goal {}", problem.goal),
            ))
        }
        Outcome::BudgetExhausted => {
            return Err(Stop::new(
                Exit::Unsolvable,
                format!(
                    "the search budget ran out after {} expansions without reaching the goal {}",
                    report.expanded, problem.goal
                ),
            ))
        }
    };
    if let Verdict::Invalid { step, condition } = validate_plan(&problem, &plan) {
        return Err(Stop::internal(format!(
            "the plan fails validation at step {step}: {condition}"
        )));
    }
    run.write("plan.txt", &plan.to_text()).map_err(io)?;
    let instructions = translate_plan(
        &plan,
        &problem.domain,
        Some(&cx.session.gateway),
        &cx.config.abstraction(),
    );
    run.write_json("instructions.json", &instructions)
        .map_err(io)?;
    run.write("instructions.txt", &instructions.to_string())
        .map_err(io)?;
    Ok(Planned {
        problem,
        plan,
        instructions,
    })
}

/// Execute instructions in a world and report the validator's decision.
pub fn execute(
    cx: &mut Context<'_>,
    instructions: &InstructionList,
    goal: &Expr,
    world: WorldState,
    run: &mut RunDir,
) -> Result<ExecutionReport, Stop> {
    let mut env = TextWorldEnv::new(world);
    env.agent_centric = cx.config.executor.agent_centric;
    let report = run_execution(
        instructions,
        goal,
        &mut env,
        &cx.session.gateway,
        &cx.config.executor(),
    );
    run.write_json("execution.json", &report).map_err(io)?;
    run.write_json("world.json", &env.state).map_err(io)?;
    let logs: Vec<String> = report.attempts.iter().map(|a| a.render()).collect();
    run.write("execution.txt", &logs.join("\n")).map_err(io)?;
    Ok(report)
}

/// The run record for an execution report.
pub fn execution_record(command: &str, report: &ExecutionReport) -> RunRecord {
    let invocations: Vec<String> = report
        .attempts
        .iter()
        .flat_map(|a| a.invocations().map(ToString::to_string))
        .collect();
    let base = match report.final_verdict() {
        ValidatorVerdict::GoalMet => RunRecord::new(command, Exit::Ok, "the goal was reached"),
        ValidatorVerdict::Abort(reason) => RunRecord::new(command, Exit::Abort, reason.clone()),
        ValidatorVerdict::Retry(f) => RunRecord::new(
            command,
            Exit::Internal,
            format!("execution ended on a retry verdict: {f}"),
        ),
    };
    base.with("attempts", report.attempts.len())
        .with("goal_holds", report.goal_holds)
        .with("invocations", invocations)
}

pub fn plan_record(command: &str, planned: &Planned) -> RunRecord {
    RunRecord::new(
        command,
        Exit::Ok,
        format!("found a plan of {} steps", planned.plan.len()),
    )
    .with(
        "plan",
        planned
            .plan
            .steps
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>(),
    )
    .with("goal", planned.problem.goal.to_string())
    .with("instructions", json!(planned.instructions.texts()))
}
