//! End-to-end runs of the `adaplan` command line in-process.

use std::path::{Path, PathBuf};

use adaplan_cli::rundir::compare_run_dirs;
use adaplan_cli::scenario::{self, LoadedScenario};
use adaplan_cli::DEFAULT_DATA_DIR;
use serde_json::{json, Value};

fn data() -> PathBuf {
    PathBuf::from(DEFAULT_DATA_DIR)
}

fn adaplan(args: &[&str]) -> i32 {
    let mut argv = vec!["adaplan"];
    argv.extend_from_slice(args);
    adaplan_cli::run(argv)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn record(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("record.json")).unwrap()).unwrap()
}

fn write(path: &Path, value: &Value) {
    std::fs::write(path, serde_json::to_string_pretty(value).unwrap()).unwrap();
}

#[test]
fn every_bundled_scenario_replays_with_its_expected_exit() {
    let names = scenario::list(&data());
    assert!(names.len() >= 11, "{names:?}");
    let tmp = tempfile::tempdir().unwrap();
    for name in names {
        let loaded = LoadedScenario::load(&data(), &name).unwrap();
        let out = tmp.path().join(&name);
        let code = adaplan(&["scenario", &name, "--out-dir", s(&out)]);
        assert_eq!(
            code,
            loaded.scenario.expect.exit,
            "{name}: {}",
            record(&out)
        );
        assert_eq!(record(&out)["exit_code"], json!(code));
    }
}

#[test]
fn rerecording_reproduces_the_shipped_transcripts() {
    let tmp = tempfile::tempdir().unwrap();
    for name in scenario::list(&data()) {
        let loaded = LoadedScenario::load(&data(), &name).unwrap();
        let fixture = tmp.path().join(format!("{name}.json"));
        let out = tmp.path().join(&name);
        adaplan(&[
            "scenario",
            &name,
            "--mode",
            "record",
            "--fixture",
            s(&fixture),
            "--out-dir",
            s(&out),
        ]);
        let shipped = std::fs::read_to_string(loaded.transcript()).unwrap();
        let fresh = std::fs::read_to_string(&fixture).unwrap();
        assert!(
            shipped == fresh,
            "{name}: the shipped transcript is stale; re-record it"
        );
    }
}

#[test]
fn replays_into_different_directories_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["color", "salmon", "unsolvable"] {
        let a = tmp.path().join(format!("{name}-a"));
        let b = tmp.path().join(format!("{name}-b"));
        adaplan(&["scenario", name, "--out-dir", s(&a)]);
        adaplan(&["scenario", name, "--out-dir", s(&b)]);
        compare_run_dirs(&a, &b).unwrap();
    }
}

#[test]
fn replay_of_a_different_task_diverges_with_exit_70() {
    let tmp = tempfile::tempdir().unwrap();
    let task = tmp.path().join("task.json");
    write(
        &task,
        &json!({"name": "color", "domain": "Blocks.", "init": "Two blocks.", "goal": "Something else."}),
    );
    let fixture = data().join("scenarios/color/transcript.json");
    let out = tmp.path().join("out");
    let code = adaplan(&[
        "plan",
        "--task",
        s(&task),
        "--mode",
        "replay",
        "--fixture",
        s(&fixture),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(code, 70);
    assert!(record(&out)["message"]
        .as_str()
        .unwrap()
        .contains("replay diverged"));
}

#[test]
fn configuration_problems_exit_64() {
    let tmp = tempfile::tempdir().unwrap();
    let task = tmp.path().join("task.json");
    write(
        &task,
        &json!({"name": "t", "domain": "", "init": "x", "goal": "y"}),
    );
    // Replay without a fixture.
    assert_eq!(
        adaplan(&[
            "plan",
            "--task",
            s(&task),
            "--mode",
            "replay",
            "--out-dir",
            s(&tmp.path().join("a"))
        ]),
        64
    );
    // Live mode without the key variable.
    let cfg = tmp.path().join("cfg.json");
    write(
        &cfg,
        &json!({"live": {"api_key_env": "ADAPLAN_TEST_KEY_THAT_IS_NEVER_SET"}}),
    );
    let out = tmp.path().join("b");
    assert_eq!(
        adaplan(&[
            "plan",
            "--task",
            s(&task),
            "--config",
            s(&cfg),
            "--out-dir",
            s(&out)
        ]),
        64
    );
    assert!(record(&out)["message"]
        .as_str()
        .unwrap()
        .contains("ADAPLAN_TEST_KEY_THAT_IS_NEVER_SET"));
    // Unknown configuration keys and out-of-range values.
    write(&cfg, &json!({"tua": 0.5}));
    assert_eq!(
        adaplan(&["plan", "--task", s(&task), "--config", s(&cfg)]),
        64
    );
    assert_eq!(
        adaplan(&[
            "scenario",
            "color",
            "--temperature",
            "7",
            "--out-dir",
            s(&tmp.path().join("c"))
        ]),
        64
    );
    // A non-empty output directory.
    std::fs::write(tmp.path().join("c").join("keep"), "").ok();
    std::fs::create_dir_all(tmp.path().join("d")).unwrap();
    std::fs::write(tmp.path().join("d/keep"), "").unwrap();
    assert_eq!(
        adaplan(&["scenario", "color", "--out-dir", s(&tmp.path().join("d"))]),
        64
    );
    // Missing task file and unknown scenario.
    assert_eq!(adaplan(&["plan", "--task", "/nonexistent/task.json"]), 64);
    assert_eq!(adaplan(&["scenario", "no-such-scenario"]), 64);
    assert_eq!(adaplan(&["frobnicate"]), 64);
}

#[test]
fn run_directory_holds_the_expected_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("salmon");
    assert_eq!(adaplan(&["scenario", "salmon", "--out-dir", s(&out)]), 0);
    for f in [
        "pipeline.json",
        "domain.pddl",
        "problem.pddl",
        "problem.json",
        "solve.json",
        "plan.txt",
        "instructions.json",
        "instructions.txt",
        "execution.json",
        "execution.txt",
        "world.json",
        "transcript.json",
        "record.json",
        "manifest.json",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let listed: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["path"].as_str().unwrap())
        .collect();
    assert!(listed.contains(&"record.json") && listed.contains(&"transcript.json"));
    assert_eq!(
        std::fs::read_to_string(out.join("plan.txt")).unwrap(),
        "open(fridge_305)\ngrab(salmon, fridge_305)\nheat(salmon)\nput_on(salmon, kitchentable)\n"
    );
    let world: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("world.json")).unwrap()).unwrap();
    let salmon = world["entities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["id"] == "salmon")
        .unwrap();
    assert_eq!(salmon["location"], json!({"on": "kitchentable"}));
}

#[test]
fn domain_stage_repair_reruns_generation_with_the_fixed_domain() {
    let tmp = tempfile::tempdir().unwrap();
    let blocks =
        std::fs::read_to_string(data().join("benchmarks/blocksworld/domain.pddl")).unwrap();
    // A JSON domain whose stack action uses an undeclared predicate: it
    // deserializes but fails validation, leaving a candidate to repair.
    let model = adaplan_core::pddl::parse_domain(&blocks).unwrap();
    let broken = serde_json::to_string(&model)
        .unwrap()
        .replace("(clear ?b2)", "(free ?b2)");
    assert!(broken.contains("(free ?b2)"));
    let script = json!({
        "replies": {
            "init": [{"content": r#"{"objects": [{"name": "b1", "type": "block"}, {"name": "b2", "type": "block"}], "init": ["(ontable b1)", "(ontable b2)", "(clear b1)", "(clear b2)", "(handempty)"]}"#}],
            "goal": [{"content": r#"{"goal": "(on b1 b2)"}"#}],
            "debugger": [{"content": format!("Use the declared predicate clear.\n```pddl\n{blocks}```")}],
            "abstraction": [{"content": "1. Pick up b1.\n2. Stack b1 on b2."}]
        },
        "fallback": {
            "domain": {"content": broken},
            "critic": {"content": r#"{"score": 1.0, "feedback": "fine"}"#}
        }
    });
    let script_path = tmp.path().join("script.json");
    write(&script_path, &script);
    let task = tmp.path().join("task.json");
    write(
        &task,
        &json!({"name": "blocks", "domain": "Blocks on a table.", "init": "Two blocks on the table.", "goal": "Put b1 on b2."}),
    );
    let fixture = tmp.path().join("fixture.json");
    let out = tmp.path().join("rec");
    let args = [
        "plan",
        "--task",
        s(&task),
        "--correction-limit",
        "2",
        "--out-dir",
    ];
    let mut rec = args.to_vec();
    rec.extend([
        s(&out),
        "--mode",
        "record",
        "--script",
        s(&script_path),
        "--fixture",
        s(&fixture),
    ]);
    assert_eq!(adaplan(&rec), 0, "{}", record(&out));
    let debug: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("debug.json")).unwrap()).unwrap();
    assert_eq!(debug["verified"], json!(true));
    assert!(out.join("pipeline-repaired.json").is_file());
    let repaired = std::fs::read_to_string(out.join("pipeline-repaired.json")).unwrap();
    assert!(repaired.contains("\"bypassed\""));

    // The recording replays to the same artifacts.
    let again = tmp.path().join("rep");
    let mut rep = args.to_vec();
    rep.extend([s(&again), "--mode", "replay", "--fixture", s(&fixture)]);
    assert_eq!(adaplan(&rep), 0);
    compare_run_dirs(&out, &again).unwrap();
}

#[test]
fn disabled_debugger_leaves_the_limit_as_a_generation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    write(&cfg, &json!({"debugger": {"enabled": false}}));
    let loaded = LoadedScenario::load(&data(), "goal-repair").unwrap();
    let out = tmp.path().join("out");
    let code = adaplan(&[
        "scenario",
        "goal-repair",
        "--config",
        s(&cfg),
        "--mode",
        "record",
        "--script",
        s(&loaded.script()),
        "--fixture",
        s(&tmp.path().join("fx.json")),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(code, 65);
    assert!(record(&out)["message"]
        .as_str()
        .unwrap()
        .contains("correction limit"));
}

#[test]
fn execute_runs_an_earlier_plan_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let plan_dir = tmp.path().join("plan");
    assert_eq!(
        adaplan(&["scenario", "fridge-teach", "--out-dir", s(&plan_dir)]),
        0
    );
    let script = json!({
        "replies": {
            "executor": [
                {"content": "", "tool_calls": [{"id": "c1", "name": "open", "arguments": {"target": "fridge_305"}}]},
                {"content": "done"},
                {"content": "", "tool_calls": [{"id": "c2", "name": "grab", "arguments": {"target": "milk"}}]},
                {"content": "done"},
                {"content": "", "tool_calls": [{"id": "c3", "name": "close", "arguments": {"target": "fridge_305"}}]},
                {"content": "done"},
                {"content": "", "tool_calls": [{"id": "c4", "name": "put_on", "arguments": {"object": "milk", "surface": "kitchentable"}}]},
                {"content": "done"}
            ],
            "validator": [{"content": r#"{"decision": "goal-met", "feedback": "ok"}"#}]
        }
    });
    let script_path = tmp.path().join("script.json");
    write(&script_path, &script);
    let out = tmp.path().join("exec");
    let code = adaplan(&[
        "execute",
        "--plan-dir",
        s(&plan_dir),
        "--mode",
        "record",
        "--script",
        s(&script_path),
        "--fixture",
        s(&tmp.path().join("fx.json")),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(code, 0, "{}", record(&out));
    assert_eq!(record(&out)["details"]["goal_holds"], json!(true));
}

#[test]
fn answers_file_feeds_user_questions() {
    let tmp = tempfile::tempdir().unwrap();
    let loaded = LoadedScenario::load(&data(), "color").unwrap();
    let task = tmp.path().join("task.json");
    write(&task, &serde_json::to_value(&loaded.scenario.task).unwrap());
    let answers = tmp.path().join("answers.txt");
    std::fs::write(&answers, "red\nblue\n").unwrap();
    let out = tmp.path().join("out");
    let code = adaplan(&[
        "plan",
        "--task",
        s(&task),
        "--mode",
        "record",
        "--script",
        s(&loaded.script()),
        "--fixture",
        s(&tmp.path().join("fx.json")),
        "--answers-file",
        s(&answers),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let problem = std::fs::read_to_string(out.join("problem.pddl")).unwrap();
    assert!(problem.contains("(color b1 red)"), "{problem}");

    // One answer short: the interaction fails.
    std::fs::write(&answers, "red\n").unwrap();
    let out = tmp.path().join("short");
    let code = adaplan(&[
        "plan",
        "--task",
        s(&task),
        "--mode",
        "record",
        "--script",
        s(&loaded.script()),
        "--fixture",
        s(&tmp.path().join("fx2.json")),
        "--answers-file",
        s(&answers),
        "--out-dir",
        s(&out),
    ]);
    assert_eq!(code, 65);
}

#[test]
fn solve_reports_plans_and_unsolvable_problems() {
    let tmp = tempfile::tempdir().unwrap();
    let domain = data().join("benchmarks/blocksworld/domain.pddl");
    let problem = data().join("benchmarks/blocksworld/p01.pddl");
    assert_eq!(
        adaplan(&["solve", "--domain", s(&domain), "--problem", s(&problem)]),
        0
    );
    let impossible = tmp.path().join("p.pddl");
    std::fs::write(
        &impossible,
        "(define (problem x) (:domain blocksworld) (:objects a b - block)
           (:init (ontable a) (ontable b) (clear a) (clear b) (handempty))
           (:goal (and (on a b) (on b a))))",
    )
    .unwrap();
    assert_eq!(
        adaplan(&["solve", "--domain", s(&domain), "--problem", s(&impossible)]),
        2
    );
    std::fs::write(&impossible, "(define (problem x").unwrap();
    assert_eq!(
        adaplan(&["solve", "--domain", s(&domain), "--problem", s(&impossible)]),
        64
    );
}

#[test]
fn bench_tolerates_corrupt_files_and_empty_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let bench = tmp.path().join("bench/blocks");
    std::fs::create_dir_all(&bench).unwrap();
    for f in ["domain.pddl", "p01.pddl", "p02.pddl"] {
        std::fs::copy(data().join("benchmarks/blocksworld").join(f), bench.join(f)).unwrap();
    }
    std::fs::write(
        bench.join("p03.pddl"),
        "(define (problem broken) (:domain blocksworld) (:objects",
    )
    .unwrap();
    let out = tmp.path().join("out");
    assert_eq!(
        adaplan(&[
            "bench",
            s(&tmp.path().join("bench")),
            "--repeat",
            "2",
            "--out-dir",
            s(&out)
        ]),
        0
    );
    let rows: Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("bench.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0]["status"], "plan");
    assert_eq!(rows[0]["valid"], json!(true));
    assert_eq!(rows[2]["status"], "parse-error");

    let empty = tmp.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let out = tmp.path().join("out-empty");
    assert_eq!(adaplan(&["bench", s(&empty), "--out-dir", s(&out)]), 0);
    assert_eq!(
        std::fs::read_to_string(out.join("bench.json"))
            .unwrap()
            .trim(),
        "[]"
    );
    assert_eq!(
        adaplan(&[
            "bench",
            s(&empty),
            "--repeat",
            "0",
            "--out-dir",
            s(&tmp.path().join("z"))
        ]),
        64
    );
}

#[test]
fn memory_commands_use_the_store() {
    let tmp = tempfile::tempdir().unwrap();
    let store = tmp.path().join("memory.jsonl");
    assert_eq!(adaplan(&["memory", "list"]), 64);
    assert_eq!(
        adaplan(&[
            "memory",
            "add",
            "always close the fridge",
            "--memory-store",
            s(&store)
        ]),
        0
    );
    assert_eq!(
        adaplan(&[
            "memory",
            "add",
            "stack larger blocks below",
            "--memory-store",
            s(&store)
        ]),
        0
    );
    assert_eq!(adaplan(&["memory", "list", "--memory-store", s(&store)]), 0);
    assert_eq!(
        adaplan(&[
            "memory",
            "query",
            "close the fridge",
            "--k",
            "1",
            "--memory-store",
            s(&store)
        ]),
        0
    );
    assert_eq!(std::fs::read_to_string(&store).unwrap().lines().count(), 2);
    assert_eq!(
        adaplan(&["memory", "add", "  ", "--memory-store", s(&store)]),
        64
    );
}

#[test]
fn scenario_list_names_the_bundled_scenarios() {
    let names = scenario::list(&data());
    for expected in [
        "color",
        "salmon",
        "fridge",
        "battery",
        "unsolvable",
        "always-malformed",
        "validator-abort",
    ] {
        assert!(
            names.iter().any(|n| n == expected),
            "{expected} missing from {names:?}"
        );
    }
    assert_eq!(adaplan(&["scenario", "--list"]), 0);
}
