//! Task files and bundled scenarios.
//!
//! A scenario directory holds `scenario.json` (the task and its inputs),
//! `script.json` (the model replies used when recording) and
//! `transcript.json` (the recorded fixture that replays it).

use std::path::{Path, PathBuf};

use adaplan_agents::generators::Task;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCENARIO_FILE: &str = "scenario.json";
pub const SCRIPT_FILE: &str = "script.json";
pub const TRANSCRIPT_FILE: &str = "transcript.json";

/// Natural language descriptions of a planning task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub domain: String,
    pub init: String,
    pub goal: String,
}

impl TaskSpec {
    pub fn read(path: &Path) -> Result<TaskSpec, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("{} is not a task file: {e}", path.display()))
    }

    pub fn task(&self) -> Task {
        Task {
            name: self.name.clone(),
            domain: self.domain.clone(),
            init: self.init.clone(),
            goal: self.goal.clone(),
            provided_domain: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioCommand {
    /// Generate, solve and translate.
    Plan,
    /// Plan, then execute in the world.
    Run,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    pub exit: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub command: ScenarioCommand,
    pub task: TaskSpec,
    /// PDDL domain given instead of generated, relative to the scenario
    /// directory.
    #[serde(default)]
    pub domain_file: Option<PathBuf>,
    /// World fixture for `run`, relative to the scenario directory.
    #[serde(default)]
    pub world: Option<PathBuf>,
    /// Memory entries loaded when no store is configured.
    #[serde(default)]
    pub memory: Vec<String>,
    /// Answers to user questions, used while recording.
    #[serde(default)]
    pub answers: Vec<String>,
    /// Configuration overrides.
    #[serde(default)]
    pub settings: Value,
    pub expect: Expectation,
}

/// A scenario with the directory it was loaded from.
#[derive(Debug, Clone)]
pub struct LoadedScenario {
    pub dir: PathBuf,
    pub scenario: Scenario,
}

impl LoadedScenario {
    /// `name` is a directory path, or a scenario name under
    /// `<data>/scenarios`.
    pub fn load(data_dir: &Path, name: &str) -> Result<LoadedScenario, String> {
        let direct = PathBuf::from(name);
        let dir = if direct.join(SCENARIO_FILE).is_file() {
            direct
        } else {
            data_dir.join("scenarios").join(name)
        };
        let path = dir.join(SCENARIO_FILE);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let scenario: Scenario = serde_json::from_str(&text)
            .map_err(|e| format!("{} is not a scenario: {e}", path.display()))?;
        if !scenario.settings.is_null() && !scenario.settings.is_object() {
            return Err(format!("{}: settings must be an object", path.display()));
        }
        Ok(LoadedScenario { dir, scenario })
    }

    pub fn resolve(&self, rel: &Path) -> PathBuf {
        self.dir.join(rel)
    }

    pub fn transcript(&self) -> PathBuf {
        self.dir.join(TRANSCRIPT_FILE)
    }

    pub fn script(&self) -> PathBuf {
        self.dir.join(SCRIPT_FILE)
    }
}

/// Names of the scenarios under `<data>/scenarios`, sorted.
pub fn list(data_dir: &Path) -> Vec<String> {
    let Ok(entries) = std::fs::read_dir(data_dir.join("scenarios")) else {
        return Vec::new();
    };
    let mut names: Vec<String> = entries
        .filter_map(Result::ok)
        .filter(|e| e.path().join(SCENARIO_FILE).is_file())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}
