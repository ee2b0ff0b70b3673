//! The `adaplan` command line: generate planning problems from natural
//! language, solve them, and carry the plans out in a text household.
//!
//! Every command that talks to a model writes a run directory holding its
//! artifacts, the gateway transcript, `record.json` and a manifest. The
//! process exit code is taken from [`exit::Exit`].

pub mod bench;
pub mod config;
pub mod exit;
pub mod flow;
pub mod rundir;
pub mod scenario;
pub mod session;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use adaplan_agents::abstraction::InstructionList;
use adaplan_agents::gateway::HashedBow;
use adaplan_agents::generators::Task;
use adaplan_core::ir::ProblemInstance;
use adaplan_core::pddl::{parse_domain, parse_problem};
use adaplan_core::planner::{ground, solve, Outcome};
use adaplan_core::world::WorldState;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use config::{Config, Mode};
use exit::{Exit, RunRecord};
use flow::{Context, Stop};
use rundir::RunDir;
use scenario::{LoadedScenario, ScenarioCommand, TaskSpec};
use session::{Session, Source};

/// Built-in data directory (prompts, documentation, worlds, scenarios).
pub const DEFAULT_DATA_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data");
/// Overrides [`DEFAULT_DATA_DIR`].
pub const DATA_ENV: &str = "ADAPLAN_DATA";

#[derive(Debug, Parser)]
#[command(
    name = "adaplan",
    version,
    about = "Natural language to PDDL planning with tool-using agents"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Where model replies come from.
    #[arg(long, global = true, value_enum)]
    pub mode: Option<Mode>,
    /// Transcript to replay, or to write when recording.
    #[arg(long, global = true)]
    pub fixture: Option<PathBuf>,
    /// Reply script to record from instead of the live endpoint.
    #[arg(long, global = true)]
    pub script: Option<PathBuf>,
    /// Model id sent to the endpoint.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Sampling temperature in [0, 2].
    #[arg(long, global = true)]
    pub temperature: Option<f64>,
    /// Critic acceptance threshold.
    #[arg(long, global = true)]
    pub tau: Option<f64>,
    /// Generation turns allowed per agent.
    #[arg(long, global = true)]
    pub correction_limit: Option<usize>,
    /// Run directory; defaults to runs/<timestamp>-<command>.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Answers to user questions, one per line.
    #[arg(long, global = true)]
    pub answers_file: Option<PathBuf>,
    /// Persistent JSONL memory store.
    #[arg(long, global = true)]
    pub memory_store: Option<PathBuf>,
    /// Data directory (prompts, docs, worlds, scenarios).
    #[arg(long, global = true)]
    pub data_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a problem from a task file, solve it and translate the plan.
    Plan {
        /// Task JSON with name, domain, init and goal descriptions.
        #[arg(long)]
        task: PathBuf,
        /// Use this PDDL domain instead of generating one.
        #[arg(long)]
        domain: Option<PathBuf>,
    },
    /// Plan, then execute the plan in a world.
    Run {
        #[arg(long)]
        task: PathBuf,
        #[arg(long)]
        domain: Option<PathBuf>,
        /// World JSON; defaults to the bundled kitchen.
        #[arg(long)]
        world: Option<PathBuf>,
    },
    /// Execute the instructions of an earlier plan run.
    Execute {
        #[arg(long)]
        plan_dir: PathBuf,
        #[arg(long)]
        world: Option<PathBuf>,
    },
    /// Solve a PDDL domain and problem and print the plan.
    Solve {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long)]
        problem: PathBuf,
    },
    /// Run the planner over a benchmark directory.
    Bench {
        dir: PathBuf,
        /// Solve each problem this many times and report the fastest.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
    },
    /// Inspect or extend the memory store.
    Memory {
        #[command(subcommand)]
        action: MemoryAction,
    },
    /// Run a bundled scenario from its fixture.
    Scenario {
        name: Option<String>,
        /// List the bundled scenarios.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum MemoryAction {
    List,
    Add {
        summary: String,
    },
    Query {
        text: String,
        #[arg(long)]
        k: Option<usize>,
    },
}

fn data_dir(common: &Common) -> PathBuf {
    common
        .data_dir
        .clone()
        .or_else(|| std::env::var_os(DATA_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_DATA_DIR))
}

fn flag_layer(common: &Common) -> Value {
    let mut m = Map::new();
    if let Some(v) = &common.model {
        m.insert("model".into(), json!(v));
    }
    if let Some(v) = common.temperature {
        m.insert("temperature".into(), json!(v));
    }
    if let Some(v) = common.tau {
        m.insert("tau".into(), json!(v));
    }
    if let Some(v) = common.correction_limit {
        m.insert("correction_limit".into(), json!(v));
    }
    if let Some(v) = &common.memory_store {
        m.insert("memory".into(), json!({ "store": v }));
    }
    Value::Object(m)
}

fn load_config(common: &Common, scenario_layer: Option<&Value>) -> Result<Config, Stop> {
    let mut layers = Vec::new();
    if let Some(path) = &common.config {
        layers.push(Config::read_layer(path).map_err(Stop::config)?);
    }
    if let Some(layer) = scenario_layer.filter(|v| !v.is_null()) {
        layers.push(layer.clone());
    }
    layers.push(flag_layer(common));
    let config = Config::layered(&layers).map_err(Stop::config)?;
    config.check().map_err(Stop::config)?;
    Ok(config)
}

fn read_text(path: &Path) -> Result<String, Stop> {
    std::fs::read_to_string(path)
        .map_err(|e| Stop::config(format!("cannot read {}: {e}", path.display())))
}

fn read_world(path: &Path) -> Result<WorldState, Stop> {
    WorldState::from_json(&read_text(path)?)
        .map_err(|e| Stop::config(format!("{}: {e}", path.display())))
}

fn load_task(spec: &TaskSpec, domain: Option<&Path>) -> Result<Task, Stop> {
    let mut task = spec.task();
    if let Some(path) = domain {
        let text = read_text(path)?;
        let file = path.display().to_string();
        task.provided_domain =
            Some(parse_domain(&text).map_err(|e| Stop::config(e.render(&file)))?);
    }
    Ok(task)
}

/// Everything a model-backed command needs to start.
struct Launch {
    command: &'static str,
    config: Config,
    source: Source,
    out_dir: PathBuf,
    preload: Vec<String>,
}

/// The steps of a model-backed command.
enum Job {
    Plan(Task),
    Run(Task, WorldState),
    Execute {
        instructions: InstructionList,
        problem: ProblemInstance,
        world: WorldState,
    },
}

fn launch(l: Launch, job: Job, data_dir: &Path) -> RunRecord {
    let mut run = match RunDir::create(&l.out_dir) {
        Ok(r) => r,
        Err(e) => return RunRecord::new(l.command, Exit::Config, e),
    };
    let mut session = match Session::open(&l.source, &l.config.live, l.config.call_ceiling) {
        Ok(s) => s,
        Err(e) => return finish(run, RunRecord::new(l.command, Exit::Config, e), None),
    };
    let embedder = HashedBow::default();
    let mut store = match flow::open_store(&l.config, &embedder, &l.preload) {
        Ok(s) => s,
        Err(stop) => {
            return finish(
                run,
                RunRecord::new(l.command, stop.exit, stop.message),
                Some(&session),
            )
        }
    };
    let mut cx = Context {
        config: &l.config,
        data_dir,
        session: &mut session,
        store: &mut store,
        embedder: &embedder,
    };
    let outcome = match job {
        Job::Plan(task) => {
            flow::plan(&mut cx, task, &mut run).map(|p| flow::plan_record(l.command, &p))
        }
        Job::Run(task, world) => flow::plan(&mut cx, task, &mut run).and_then(|p| {
            let report = flow::execute(&mut cx, &p.instructions, &p.problem.goal, world, &mut run)?;
            let mut record = flow::execution_record(l.command, &report);
            record
                .details
                .extend(flow::plan_record(l.command, &p).details);
            Ok(record)
        }),
        Job::Execute {
            instructions,
            problem,
            world,
        } => flow::execute(&mut cx, &instructions, &problem.goal, world, &mut run)
            .map(|r| flow::execution_record(l.command, &r)),
    };
    let record = match outcome {
        Ok(r) => r,
        Err(stop) => RunRecord::new(l.command, stop.exit, stop.message),
    }
    .with("gateway_calls", session.gateway.calls())
    .with("memory_entries", store.len());
    finish(run, record, Some(&session))
}

fn finish(mut run: RunDir, mut record: RunRecord, session: Option<&Session>) -> RunRecord {
    if let Some(s) = session {
        if let Err(e) = s.close(&mut run) {
            record = RunRecord::new(&record.command, Exit::Internal, e);
        }
    }
    let dir = run.path().display().to_string();
    let written = run
        .write("record.json", &format!("{}\n", record.to_json()))
        .and_then(|_| run.finish(&record.command));
    match written {
        Ok(_) => record.with("run_dir", dir),
        Err(e) => RunRecord::new(&record.command, Exit::Internal, e),
    }
}

fn out_dir(common: &Common, command: &str) -> PathBuf {
    common
        .out_dir
        .clone()
        .unwrap_or_else(|| RunDir::default_path(command))
}

fn source(common: &Common) -> Result<Source, Stop> {
    let answers = match &common.answers_file {
        Some(p) => Some(session::read_answers(p).map_err(Stop::config)?),
        None => None,
    };
    Ok(Source {
        mode: common.mode,
        fixture: common.fixture.clone(),
        script: common.script.clone(),
        answers,
    })
}

fn default_world(data: &Path) -> PathBuf {
    data.join("worlds").join("kitchen.json")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Stop> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| Stop::config(format!("{}: {e}", path.display())))
}

fn dispatch(cli: Cli) -> Result<RunRecord, Stop> {
    let common = &cli.common;
    let data = data_dir(common);
    match cli.command {
        Command::Plan { task, domain } => {
            let task = load_task(
                &TaskSpec::read(&task).map_err(Stop::config)?,
                domain.as_deref(),
            )?;
            let l = Launch {
                command: "plan",
                config: load_config(common, None)?,
                source: source(common)?,
                out_dir: out_dir(common, "plan"),
                preload: Vec::new(),
            };
            Ok(launch(l, Job::Plan(task), &data))
        }
        Command::Run {
            task,
            domain,
            world,
        } => {
            let task = load_task(
                &TaskSpec::read(&task).map_err(Stop::config)?,
                domain.as_deref(),
            )?;
            let world = read_world(&world.unwrap_or_else(|| default_world(&data)))?;
            let l = Launch {
                command: "run",
                config: load_config(common, None)?,
                source: source(common)?,
                out_dir: out_dir(common, "run"),
                preload: Vec::new(),
            };
            Ok(launch(l, Job::Run(task, world), &data))
        }
        Command::Execute { plan_dir, world } => {
            let instructions: InstructionList = read_json(&plan_dir.join("instructions.json"))?;
            let problem: ProblemInstance = read_json(&plan_dir.join("problem.json"))?;
            let world = read_world(&world.unwrap_or_else(|| default_world(&data)))?;
            let l = Launch {
                command: "execute",
                config: load_config(common, None)?,
                source: source(common)?,
                out_dir: out_dir(common, "execute"),
                preload: Vec::new(),
            };
            Ok(launch(
                l,
                Job::Execute {
                    instructions,
                    problem,
                    world,
                },
                &data,
            ))
        }
        Command::Solve { domain, problem } => solve_files(common, &domain, &problem),
        Command::Bench { dir, repeat } => {
            let config = load_config(common, None)?;
            if repeat == 0 {
                return Err(Stop::config("--repeat must be at least 1"));
            }
            let rows = bench::run(&dir, &config.solver, repeat);
            let table = bench::table(&rows);
            print!("{table}");
            let mut run = RunDir::create(&out_dir(common, "bench")).map_err(Stop::config)?;
            run.write_json("bench.json", &rows)
                .map_err(Stop::internal)?;
            run.write("bench.txt", &table).map_err(Stop::internal)?;
            let record = RunRecord::new("bench", Exit::Ok, format!("{} problems", rows.len()))
                .with("rows", rows.len())
                .with(
                    "solved",
                    rows.iter()
                        .filter(|r| r.status == bench::RowStatus::Plan)
                        .count(),
                );
            Ok(finish(run, record, None))
        }
        Command::Memory { action } => memory(common, action),
        Command::Scenario { name, list } => {
            if list {
                for n in scenario::list(&data) {
                    println!("{n}");
                }
                return Ok(RunRecord::new("scenario", Exit::Ok, "listed scenarios"));
            }
            let Some(name) = name else {
                return Err(Stop::config("name a scenario or pass --list"));
            };
            run_scenario(common, &data, &name)
        }
    }
}

fn run_scenario(common: &Common, data: &Path, name: &str) -> Result<RunRecord, Stop> {
    let loaded = LoadedScenario::load(data, name).map_err(Stop::config)?;
    let s = &loaded.scenario;
    let config = load_config(common, Some(&s.settings))?;
    let mode = common.mode.unwrap_or(Mode::Replay);
    let source = Source {
        mode: Some(mode),
        fixture: Some(
            common
                .fixture
                .clone()
                .unwrap_or_else(|| loaded.transcript()),
        ),
        script: match mode {
            Mode::Record => Some(common.script.clone().unwrap_or_else(|| loaded.script())),
            _ => common.script.clone(),
        },
        answers: Some(s.answers.clone()),
    };
    let domain = s.domain_file.as_ref().map(|p| loaded.resolve(p));
    let task = load_task(&s.task, domain.as_deref())?;
    let command = match s.command {
        ScenarioCommand::Plan => "plan",
        ScenarioCommand::Run => "run",
    };
    let job = match s.command {
        ScenarioCommand::Plan => Job::Plan(task),
        ScenarioCommand::Run => {
            let world = match &s.world {
                Some(p) => loaded.resolve(p),
                None => default_world(data),
            };
            Job::Run(task, read_world(&world)?)
        }
    };
    let l = Launch {
        command,
        config,
        source,
        out_dir: out_dir(common, &format!("scenario-{}", s.name)),
        preload: s.memory.clone(),
    };
    Ok(launch(l, job, data)
        .with("scenario", &s.name)
        .with("expected_exit", s.expect.exit))
}

fn solve_files(common: &Common, domain: &Path, problem: &Path) -> Result<RunRecord, Stop> {
    let config = load_config(common, None)?;
    let d = parse_domain(&read_text(domain)?)
        .map_err(|e| Stop::config(e.render(&domain.display().to_string())))?;
    let p = parse_problem(&read_text(problem)?, &d)
        .map_err(|e| Stop::config(e.render(&problem.display().to_string())))?;
    let task = ground(&p).map_err(|e| Stop::config(e.to_string()))?;
    let report = solve(&task, &config.solver);
    let record = match &report.outcome {
        Outcome::Plan(plan) => {
            print!("{}", plan.to_text());
            RunRecord::new("solve", Exit::Ok, format!("plan of {} steps", plan.len()))
        }
        Outcome::Unsolvable => RunRecord::new(
            "solve",
            Exit::Unsolvable,
            format!("no plan reaches the goal {}", p.goal),
        ),
        Outcome::BudgetExhausted => RunRecord::new(
            "solve",
            Exit::Unsolvable,
            format!("search budget exhausted; goal {}", p.goal),
        ),
    };
    Ok(record
        .with("expanded", report.expanded)
        .with("generated", report.generated))
}

fn memory(common: &Common, action: MemoryAction) -> Result<RunRecord, Stop> {
    let config = load_config(common, None)?;
    let Some(path) = &config.memory.store else {
        return Err(Stop::config(
            "memory commands need --memory-store or memory.store",
        ));
    };
    let embedder = HashedBow::default();
    let mut store = adaplan_agents::memory::ProceduralStore::open(path, &embedder)
        .map_err(|e| Stop::config(e.to_string()))?;
    match action {
        MemoryAction::List => {
            for (i, e) in store.entries().iter().enumerate() {
                println!("{}. [{}] {}", i + 1, e.source, e.summary);
            }
            Ok(RunRecord::new(
                "memory",
                Exit::Ok,
                format!("{} entries", store.len()),
            ))
        }
        MemoryAction::Add { summary } => {
            store
                .store(&embedder, &summary, "user")
                .map_err(|e| Stop::config(e.to_string()))?;
            Ok(RunRecord::new(
                "memory",
                Exit::Ok,
                format!("stored; {} entries", store.len()),
            ))
        }
        MemoryAction::Query { text, k } => {
            let hits = store
                .retrieve(
                    &embedder,
                    &text,
                    k.unwrap_or(config.memory.k),
                    config.memory.threshold,
                )
                .map_err(|e| Stop::config(e.to_string()))?;
            for h in &hits {
                println!("{:.4} {}", h.score, h.entry.summary);
            }
            Ok(RunRecord::new(
                "memory",
                Exit::Ok,
                format!("{} matches", hits.len()),
            ))
        }
    }
}

/// Run the command line `args` (program name first) and return the exit
/// code. The run record is printed to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Exit::Config.code()
            } else {
                0
            };
        }
    };
    let command = match &cli.command {
        Command::Plan { .. } => "plan",
        Command::Run { .. } => "run",
        Command::Execute { .. } => "execute",
        Command::Solve { .. } => "solve",
        Command::Bench { .. } => "bench",
        Command::Memory { .. } => "memory",
        Command::Scenario { .. } => "scenario",
    };
    let record = match dispatch(cli) {
        Ok(r) => r,
        Err(stop) => RunRecord::new(command, stop.exit, stop.message),
    };
    eprintln!("{}", record.to_json());
    record.exit_code
}
