//! Acceptance suite. Each criterion runs at its stated scale and prints one
//! PASS or FAIL line; the test fails if any criterion fails.
//!
//! Run with `cargo test -p adaplan-cli --test acceptance -- --nocapture`
//! to see the report.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::Instant;

use adaplan_agents::gateway::Gateway;
use adaplan_agents::gateway::{
    cosine, Embedder, HashedBow, Script, ScriptedBackend, ScriptedReply, Transcript,
};
use adaplan_agents::generators::{
    run_pipeline, AgentRole, CriticVerdict, NoUser, PipelineConfig, PipelineResult, PipelineStatus,
    Task,
};
use adaplan_agents::memory::ProceduralStore;
use adaplan_cli::config::Config;
use adaplan_cli::rundir::compare_run_dirs;
use adaplan_cli::scenario::{self, LoadedScenario};
use adaplan_cli::DEFAULT_DATA_DIR;
use adaplan_core::ir::{Expr, GroundAtom, ProblemInstance};
use adaplan_core::number::Number;
use adaplan_core::pddl::{emit_domain, emit_problem, parse_domain, parse_plan, parse_problem};
use adaplan_core::planner::{
    ground, solve, validate_plan, Heuristic, Outcome, Plan, SolveConfig, Strategy as Search,
    Verdict,
};
use adaplan_core::world::WorldState;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, TestRunner};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::Value;

type Check = Result<String, String>;

fn data() -> PathBuf {
    PathBuf::from(DEFAULT_DATA_DIR)
}

fn adaplan(args: &[&str]) -> i32 {
    let mut argv = vec!["adaplan"];
    argv.extend_from_slice(args);
    adaplan_cli::run(argv)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

fn read(p: &Path) -> Result<String, String> {
    std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))
}

fn read_json<T: serde::de::DeserializeOwned>(p: &Path) -> Result<T, String> {
    serde_json::from_str(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Replay a bundled scenario into `out` and return the exit code.
fn replay(name: &str, out: &Path, extra: &[&str]) -> i32 {
    let mut args = vec!["scenario", name, "--out-dir", s(out)];
    args.extend_from_slice(extra);
    adaplan(&args)
}

// ---------------------------------------------------------------------------

fn object_count(p: &ProblemInstance, ty: &str) -> usize {
    p.objects.iter().filter(|o| o.ty == ty).count()
}

fn planner_soundness_and_optimality() -> Check {
    let start = Instant::now();
    let mut solved = 0;
    let mut planner_secs = 0.0;
    for (name, ty, bound) in [("blocksworld", "block", 6), ("grippers", "ball", 4)] {
        let domain = support::benchmark_domain(name);
        let problems = support::benchmark_problems(name);
        ensure(problems.len() == 20, || {
            format!("{name}: {} instances, expected 20", problems.len())
        })?;
        for (file, text) in problems {
            let p = parse_problem(&text, &domain).map_err(|e| format!("{name}/{file}: {e}"))?;
            let n = object_count(&p, ty);
            ensure(n <= bound, || {
                format!("{name}/{file}: {n} {ty}s exceeds {bound}")
            })?;
            let t0 = Instant::now();
            let task = ground(&p).map_err(|e| format!("{name}/{file}: {e}"))?;
            let report = solve(&task, &SolveConfig::optimal());
            planner_secs += t0.elapsed().as_secs_f64();
            let plan = report
                .outcome
                .plan()
                .ok_or_else(|| format!("{name}/{file}: no plan ({:?})", report.outcome))?;
            ensure(validate_plan(&p, plan).is_valid(), || {
                format!("{name}/{file}: plan does not validate")
            })?;
            match support::bfs(&p, 2_000_000) {
                support::BfsResult::Shortest(d) => ensure(plan.len() == d, || {
                    format!(
                        "{name}/{file}: plan length {} but the optimum is {d}",
                        plan.len()
                    )
                })?,
                support::BfsResult::Unsolvable => {
                    return Err(format!("{name}/{file}: oracle says unsolvable"))
                }
                support::BfsResult::TooLarge => {
                    return Err(format!("{name}/{file}: oracle state space too large"))
                }
            }
            solved += 1;
        }
    }
    ensure(planner_secs < 60.0, || {
        format!("planner took {planner_secs:.1}s")
    })?;
    Ok(format!(
        "{solved} instances optimal and valid; planner {planner_secs:.2}s, with oracle {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------------------

fn numeric_adaptation_parity() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("size-tower");
    let code = replay("size-tower", &out, &[]);
    ensure(code == 0, || format!("size-tower exited {code}"))?;
    let problem: ProblemInstance = read_json(&out.join("problem.json"))?;
    let base = parse_domain(&read(&data().join("benchmarks/blocksworld/domain.pddl"))?)
        .map_err(|e| e.to_string())?;
    ensure(
        problem.domain.fluent("size").is_some() && base.fluent("size").is_none(),
        || "size was not added to the base domain".into(),
    )?;
    let text = emit_domain(&problem.domain);
    for fragment in [
        ":numeric-fluents",
        "(:functions (size ?b))",
        "(< (size ?b1) (size ?b2))",
    ] {
        ensure(text.contains(fragment), || {
            format!("emitted domain lacks `{fragment}`:\n{text}")
        })?;
    }
    ensure(read(&out.join("domain.pddl"))? == text, || {
        "domain.pddl differs from the emitted IR".into()
    })?;
    let plan = parse_plan(&read(&out.join("plan.txt"))?).map_err(|e| e.to_string())?;
    ensure(validate_plan(&problem, &plan).is_valid(), || {
        "the plan does not validate".into()
    })?;
    // Independent check of every stack step against the initial sizes.
    let size = |b: &str| {
        problem
            .init
            .numeric
            .get(&GroundAtom::new("size", &[b]))
            .copied()
    };
    let mut stacks = 0;
    for step in &plan.steps {
        if step.action == "stack" {
            let (a, b) = (size(&step.args[0]), size(&step.args[1]));
            ensure(matches!((a, b), (Some(x), Some(y)) if x < y), || {
                format!("{step} violates the size order")
            })?;
            stacks += 1;
        }
    }
    ensure(stacks == 3, || format!("{stacks} stack steps, expected 3"))?;
    Ok(format!(
        "fragments present; {}-step plan respects sizes",
        plan.len()
    ))
}

// ---------------------------------------------------------------------------

fn battery() -> GroundAtom {
    GroundAtom::new("battery_level", &["robot1"])
}

fn with_battery(p: &ProblemInstance, level: i64, robot_room: &str) -> ProblemInstance {
    let mut q = p.clone();
    q.init.numeric.insert(battery(), Number::from_int(level));
    q.init.atoms.retain(|a| a.fluent != "at-robby");
    q.init
        .atoms
        .insert(GroundAtom::new("at-robby", &["robot1", robot_room]));
    q
}

fn battery_scenario() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("battery");
    let code = replay("battery", &out, &[]);
    ensure(code == 0, || format!("battery exited {code}"))?;
    let problem: ProblemInstance = read_json(&out.join("problem.json"))?;
    ensure(
        problem.init.numeric.get(&battery()) == Some(&Number::from_int(30)),
        || "initial battery is not 30".into(),
    )?;
    let configs = [
        SolveConfig::default(),
        SolveConfig::optimal(),
        SolveConfig {
            strategy: Search::Greedy,
            heuristic: Heuristic::HAdd,
            ..SolveConfig::default()
        },
    ];
    let check_plan = |p: &ProblemInstance, plan: &Plan| -> Result<(), String> {
        let moves = plan.steps.iter().filter(|s| s.action == "move").count();
        ensure(moves <= 2, || {
            format!("{moves} moves in {}", plan.to_text())
        })?;
        match validate_plan(p, plan) {
            Verdict::Valid { final_state } => {
                let left = final_state.numeric.get(&battery()).copied();
                ensure(left.is_some_and(|b| b >= Number::from_int(20)), || {
                    format!("final battery {left:?}")
                })
            }
            Verdict::Invalid { step, condition } => Err(format!("invalid at {step}: {condition}")),
        }
    };
    let shipped = parse_plan(&read(&out.join("plan.txt"))?).map_err(|e| e.to_string())?;
    check_plan(&problem, &shipped)?;
    for cfg in &configs {
        let r = solve(&ground(&problem).map_err(|e| e.to_string())?, cfg);
        let plan = r
            .outcome
            .plan()
            .ok_or_else(|| format!("{cfg:?}: {:?}", r.outcome))?;
        check_plan(&problem, plan)?;
    }
    // One required move: the robot starts with the ball in rooma.
    let one_move_30 = with_battery(&problem, 30, "rooma");
    let r = solve(
        &ground(&one_move_30).map_err(|e| e.to_string())?,
        &SolveConfig::optimal(),
    );
    let plan = r
        .outcome
        .plan()
        .ok_or("the one-move instance with 30 units is unsolved")?;
    ensure(
        plan.steps.iter().filter(|s| s.action == "move").count() == 1,
        || plan.to_text(),
    )?;
    for (label, instance) in [
        ("one move, battery 10", with_battery(&problem, 10, "rooma")),
        ("two moves, battery 10", with_battery(&problem, 10, "roomb")),
    ] {
        let r = solve(
            &ground(&instance).map_err(|e| e.to_string())?,
            &SolveConfig::default(),
        );
        ensure(r.outcome == Outcome::Unsolvable, || {
            format!("{label}: {:?}", r.outcome)
        })?;
    }
    Ok(format!(
        "battery 30: {} moves, final >= 20 in all strategies; battery 10: unsolvable",
        { shipped.steps.iter().filter(|s| s.action == "move").count() }
    ))
}

// ---------------------------------------------------------------------------

fn color_replay() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut first: Option<PathBuf> = None;
    for i in 0..10 {
        let out = tmp.path().join(format!("color-{i}"));
        let code = replay("color", &out, &[]);
        ensure(code == 0, || format!("replay {i} exited {code}"))?;
        let result: PipelineResult = read_json(&out.join("pipeline.json"))?;
        ensure(result.status == PipelineStatus::Complete, || {
            format!("replay {i}: {:?}", result.status)
        })?;
        let transcript = Transcript::from_json(&read(&out.join("transcript.json"))?)
            .map_err(|e| e.to_string())?;
        let color_call = transcript
            .entries
            .iter()
            .flat_map(|e| e.response.tool_calls.iter())
            .any(|c| {
                c.name == "missing_or_incorrect_fluent"
                    && c.arg("fluent_name").as_deref() == Some("color")
            });
        ensure(color_call, || {
            "no missing_or_incorrect_fluent(color, ...) call in the transcript".into()
        })?;
        ensure(
            transcript.answers.len() == 2
                && transcript
                    .answers
                    .iter()
                    .all(|a| a.question.contains("color")),
            || format!("user questions: {:?}", transcript.answers),
        )?;
        let problem: ProblemInstance = read_json(&out.join("problem.json"))?;
        let plan = parse_plan(&read(&out.join("plan.txt"))?).map_err(|e| e.to_string())?;
        ensure(
            !plan.steps.is_empty() && validate_plan(&problem, &plan).is_valid(),
            || format!("replay {i}: plan does not validate"),
        )?;
        match &first {
            None => first = Some(out),
            Some(f) => compare_run_dirs(f, &out).map_err(|e| format!("replay {i} differs: {e}"))?,
        }
    }
    Ok("10/10 replays complete with the color call, two user questions and a valid plan".into())
}

// ---------------------------------------------------------------------------

fn fridge_memory() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = tmp.path().join("memory.jsonl");
    let code = replay(
        "fridge-teach",
        &tmp.path().join("teach"),
        &["--memory-store", s(&store)],
    );
    ensure(code == 0, || format!("fridge-teach exited {code}"))?;
    let stored = ProceduralStore::open(&store, &HashedBow::default()).map_err(|e| e.to_string())?;
    ensure(stored.len() == 1, || {
        format!("{} memory entries after teaching", stored.len())
    })?;

    let out = tmp.path().join("fridge");
    let code = replay("fridge", &out, &["--memory-store", s(&store)]);
    ensure(code == 0, || format!("fridge exited {code}"))?;
    let problem: ProblemInstance = read_json(&out.join("problem.json"))?;
    let closed = Expr::Not(Box::new(Expr::atom("is_open", &["fridge_305"])));
    let conjuncts = match &problem.goal {
        Expr::And(v) => v.clone(),
        other => vec![other.clone()],
    };
    ensure(conjuncts.contains(&closed), || {
        format!("goal {} lacks {closed}", problem.goal)
    })?;
    let world =
        WorldState::from_json(&read(&out.join("world.json"))?).map_err(|e| e.to_string())?;
    let holds = world.check_goal(&problem.goal).map_err(|e| e.to_string())?;
    ensure(holds, || {
        format!("check_goal({}) is false after execution", problem.goal)
    })?;
    Ok(format!("goal {} holds in the final world", problem.goal))
}

// ---------------------------------------------------------------------------

const GOALS: [&str; 6] = [
    "(on b1 b2)",
    "(on b2 b1)",
    "(on b1 b3)",
    "(on b3 b1)",
    "(on b2 b3)",
    "(on b3 b2)",
];

fn critic_run(scores: &[f64], tau: f64, iterations: usize) -> PipelineResult {
    let mut script = Script::default();
    script.push(
        "init",
        ScriptedReply::text(
            r#"{"objects": [{"name": "b1", "type": "block"}, {"name": "b2", "type": "block"}, {"name": "b3", "type": "block"}],
                "init": ["(ontable b1)", "(ontable b2)", "(ontable b3)", "(clear b1)", "(clear b2)", "(clear b3)", "(handempty)"]}"#,
        ),
    );
    // The initial state is accepted outright; the goal sees `scores`.
    script.push(
        "critic",
        ScriptedReply::text(r#"{"score": 1.0, "feedback": "ok"}"#),
    );
    for s in scores {
        script.push(
            "critic",
            ScriptedReply::text(&format!(r#"{{"score": {s}, "feedback": "review"}}"#)),
        );
    }
    for g in GOALS {
        script.push(
            "goal",
            ScriptedReply::text(&format!(r#"{{"goal": "{g}"}}"#)),
        );
    }
    let gw = Gateway::new(ScriptedBackend::new(script));
    let task = Task {
        name: "critic".into(),
        domain: String::new(),
        init: "Three blocks on the table.".into(),
        goal: "Stack two blocks.".into(),
        provided_domain: Some(support::benchmark_domain("blocksworld")),
    };
    let cfg = PipelineConfig {
        tau,
        critic_iterations: iterations,
        ..PipelineConfig::default()
    };
    run_pipeline(task, cfg, &gw, None, &mut NoUser)
}

fn self_reflection() -> Check {
    let grid = || (0u32..=20).prop_map(|i| f64::from(i) / 20.0);
    let strategy = (proptest::collection::vec(grid(), 6), grid(), 1usize..=4);
    let mut runner = TestRunner::new(PropConfig {
        cases: 256,
        failure_persistence: None,
        ..PropConfig::default()
    });
    runner
        .run(&strategy, |(scores, tau, iterations)| {
            // Oracle: walk the scores as the contract describes.
            let mut rejections = 0;
            let mut chosen = 0;
            let mut accepted = false;
            for (i, s) in scores.iter().enumerate() {
                chosen = i;
                if *s >= tau {
                    accepted = true;
                    break;
                }
                rejections += 1;
                if rejections >= iterations {
                    break;
                }
            }
            let r = critic_run(&scores, tau, iterations);
            prop_assert_eq!(r.status, PipelineStatus::Complete);
            let goal = r.problem.as_ref().unwrap().goal.to_string();
            prop_assert_eq!(goal.as_str(), GOALS[chosen]);
            let count = |ev: &str| {
                r.events
                    .iter()
                    .filter(|e| e.agent == "goal" && e.event == ev)
                    .count()
            };
            prop_assert_eq!(count("critic-rejected"), rejections);
            prop_assert!(count("critic-rejected") <= iterations);
            prop_assert_eq!(count("critic-accepted"), usize::from(accepted));
            prop_assert_eq!(count("critic-limit"), usize::from(!accepted));
            prop_assert_eq!(r.turns(AgentRole::Goal), chosen + 1);
            for s in &scores {
                let v = CriticVerdict::from_reply(&format!(r#"{{"score": {s}}}"#), tau);
                prop_assert_eq!(v.accepted, *s >= tau);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("256 cases: accept iff score >= tau, rejections <= limit, limit keeps the latest".into())
}

// ---------------------------------------------------------------------------

const WORDS: &[&str] = &[
    "fridge",
    "close",
    "open",
    "salmon",
    "heat",
    "goal",
    "block",
    "stack",
    "color",
    "red",
    "blue",
    "table",
    "the",
    "a",
    "microwave",
    "size",
    "battery",
    "move",
    "robot",
    "put",
];

fn sentence(rng: &mut StdRng) -> String {
    let n = rng.gen_range(1..7);
    (0..n)
        .map(|_| WORDS[rng.gen_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// sign(s)·s² in exact rationals; it orders like the cosine s itself.
fn signed_square(q: &[f64], v: &[f64]) -> BigRational {
    let big = |x: f64| BigInt::from(x as i64);
    let dot: BigInt = q.iter().zip(v).map(|(a, b)| big(*a) * big(*b)).sum();
    let nq: BigInt = q.iter().map(|a| big(*a) * big(*a)).sum();
    let nv: BigInt = v.iter().map(|a| big(*a) * big(*a)).sum();
    let zero = BigInt::from(0);
    if nq == zero || nv == zero {
        return BigRational::from_integer(zero);
    }
    let sq = BigRational::new(&dot * &dot, nq * nv);
    if dot < zero {
        -sq
    } else {
        sq
    }
}

fn memory_oracle() -> Check {
    let e = HashedBow::default();
    let mut rng = StdRng::seed_from_u64(2024);
    let mut queries = 0;
    for _ in 0..200 {
        let mut store = ProceduralStore::in_memory(&e);
        for _ in 0..rng.gen_range(0..40) {
            store
                .store_at(&e, &sentence(&mut rng), "oracle", "2025-01-01T00:00:00Z")
                .map_err(|x| x.to_string())?;
        }
        for _ in 0..50 {
            let query = sentence(&mut rng);
            let k = rng.gen_range(1..8);
            let theta = [-1.0, 0.0, 0.2, 0.35, 0.5][rng.gen_range(0..5)];
            let got: Vec<(usize, f64)> = store
                .retrieve(&e, &query, k, theta)
                .map_err(|x| x.to_string())?
                .iter()
                .map(|r| {
                    (
                        store
                            .entries()
                            .iter()
                            .position(|x| std::ptr::eq(x, r.entry))
                            .unwrap(),
                        r.score,
                    )
                })
                .collect();
            let q = e.embed(&query).map_err(|x| x.to_string())?;
            let mut all: Vec<(usize, BigRational, f64)> = store
                .entries()
                .iter()
                .enumerate()
                .map(|(i, en)| {
                    (
                        i,
                        signed_square(&q, &en.embedding),
                        cosine(&q, &en.embedding),
                    )
                })
                .filter(|(_, _, sc)| *sc >= theta)
                .collect();
            all.sort_by(|a, b| match b.1.cmp(&a.1) {
                Ordering::Equal => a.0.cmp(&b.0),
                o => o,
            });
            let want: Vec<(usize, f64)> =
                all.into_iter().take(k).map(|(i, _, sc)| (i, sc)).collect();
            ensure(got == want, || {
                format!("query {query:?}: got {got:?}, want {want:?}")
            })?;
            queries += 1;
        }
    }
    Ok(format!(
        "200 stores x 50 queries = {queries} retrievals match the exact scan"
    ))
}

// ---------------------------------------------------------------------------

fn codec_round_trip() -> Check {
    let (mut domains, mut problems) = (0, 0);
    for name in support::DOMAINS {
        let d = support::benchmark_domain(name);
        let text = emit_domain(&d);
        let again = parse_domain(&text).map_err(|e| format!("{name}: {e}"))?;
        ensure(again == d && emit_domain(&again) == text, || {
            format!("{name}: domain is not a fixpoint")
        })?;
        domains += 1;
        for (file, src) in support::benchmark_problems(name) {
            let p = parse_problem(&src, &d).map_err(|e| format!("{name}/{file}: {e}"))?;
            let emitted = emit_problem(&p);
            let q = parse_problem(&emitted, &d).map_err(|e| format!("{name}/{file}: {e}"))?;
            ensure(q == p && emit_problem(&q) == emitted, || {
                format!("{name}/{file}: not a fixpoint")
            })?;
            problems += 1;
        }
    }
    ensure(domains == 7 && problems == 140, || {
        format!("{domains} domains, {problems} problems")
    })?;
    Ok("7 domains and 140 problems are codec fixpoints".into())
}

// ---------------------------------------------------------------------------

fn ceiling_for(loaded: &LoadedScenario) -> Result<usize, String> {
    let layers: Vec<Value> = if loaded.scenario.settings.is_null() {
        Vec::new()
    } else {
        vec![loaded.scenario.settings.clone()]
    };
    Ok(Config::layered(&layers)?.call_ceiling)
}

fn recursion_limit() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tmp.path().join("always-malformed");
    let code = replay("always-malformed", &out, &[]);
    ensure(code == 65, || format!("always-malformed exited {code}"))?;
    let r: PipelineResult = read_json(&out.join("pipeline.json"))?;
    ensure(r.status == PipelineStatus::CorrectionLimitReached, || {
        format!("{:?}", r.status)
    })?;
    ensure(r.turns(AgentRole::Domain) == 10, || {
        format!("{} domain turns", r.turns(AgentRole::Domain))
    })?;
    let mut worst = (String::new(), 0usize, 0usize);
    for name in scenario::list(&data()) {
        let loaded = LoadedScenario::load(&data(), &name)?;
        let ceiling = ceiling_for(&loaded)?;
        let t = Transcript::from_json(&read(&loaded.transcript())?).map_err(|e| e.to_string())?;
        ensure(t.entries.len() <= ceiling, || {
            format!("{name}: {} calls > ceiling {ceiling}", t.entries.len())
        })?;
        if t.entries.len() > worst.1 {
            worst = (name, t.entries.len(), ceiling);
        }
    }
    Ok(format!(
        "exactly 10 turns; largest fixture {} uses {}/{} calls",
        worst.0, worst.1, worst.2
    ))
}

// ---------------------------------------------------------------------------

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let names = scenario::list(&data());
    for name in &names {
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        let (ca, cb) = (replay(name, &a, &[]), replay(name, &b, &[]));
        ensure(ca == cb, || format!("{name}: exit {ca} then {cb}"))?;
        compare_run_dirs(&a, &b).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!(
        "{} scenarios replay to identical run directories",
        names.len()
    ))
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Check); 10] = [
        (
            "planner soundness and optimality",
            planner_soundness_and_optimality,
        ),
        ("numeric adaptation parity", numeric_adaptation_parity),
        ("battery scenario", battery_scenario),
        ("color-goal pipeline replay", color_replay),
        ("fridge memory scenario", fridge_memory),
        ("self-reflection contract", self_reflection),
        ("memory retrieval oracle", memory_oracle),
        ("codec round trip", codec_round_trip),
        ("recursion-limit conformance", recursion_limit),
        ("end-to-end determinism", determinism),
    ];
    println!();
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name} ({secs:.1}s): {detail}"),
            Err(why) => {
                println!("FAIL  {name} ({secs:.1}s): {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
