//! Run configuration: a JSON file, scenario settings and flags, merged in
//! that order over the defaults.

use std::path::{Path, PathBuf};

use adaplan_agents::abstraction::AbstractionConfig;
use adaplan_agents::debugger::{DebugConfig, DEFAULT_SNIPPETS};
use adaplan_agents::executor::{ExecutorConfig, DEFAULT_RETRY_BUDGET, DEFAULT_STEP_BUDGET};
use adaplan_agents::gateway::{LiveConfig, DEFAULT_TEMPERATURE};
use adaplan_agents::generators::{
    PipelineConfig, DEFAULT_CALL_CEILING, DEFAULT_CORRECTION_LIMIT, DEFAULT_CRITIC_ITERATIONS,
    DEFAULT_TAU,
};
use adaplan_agents::memory::{DEFAULT_K, DEFAULT_THRESHOLD};
use adaplan_core::planner::SolveConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Where model replies come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Call the configured endpoint.
    Live,
    /// Call the endpoint, or a reply script, and write the transcript to
    /// the fixture path.
    Record,
    /// Serve replies from the fixture transcript.
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MemorySettings {
    /// JSONL store; an in-memory store is used when absent.
    pub store: Option<PathBuf>,
    pub k: usize,
    pub threshold: f64,
}

impl Default for MemorySettings {
    fn default() -> Self {
        MemorySettings {
            store: None,
            k: DEFAULT_K,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecutionSettings {
    pub step_budget: usize,
    pub retry_budget: usize,
    /// Describe only the agent's surroundings to the executor.
    pub agent_centric: bool,
}

impl Default for ExecutionSettings {
    fn default() -> Self {
        ExecutionSettings {
            step_budget: DEFAULT_STEP_BUDGET,
            retry_budget: DEFAULT_RETRY_BUDGET,
            agent_centric: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DebuggerSettings {
    pub enabled: bool,
    pub k: usize,
    /// Documentation corpus; defaults to `docs/` in the data directory.
    pub docs: Option<PathBuf>,
}

impl Default for DebuggerSettings {
    fn default() -> Self {
        DebuggerSettings {
            enabled: true,
            k: DEFAULT_SNIPPETS,
            docs: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub model: String,
    pub temperature: f64,
    pub correction_limit: usize,
    pub tau: f64,
    pub critic_iterations: usize,
    pub critic: bool,
    pub context_capacity: usize,
    pub max_restarts: usize,
    /// Gateway calls allowed in one command.
    pub call_ceiling: usize,
    pub memory: MemorySettings,
    pub solver: SolveConfig,
    pub executor: ExecutionSettings,
    pub debugger: DebuggerSettings,
    pub live: LiveConfig,
}

impl Default for Config {
    fn default() -> Self {
        let p = PipelineConfig::default();
        Config {
            model: p.model,
            temperature: DEFAULT_TEMPERATURE,
            correction_limit: DEFAULT_CORRECTION_LIMIT,
            tau: DEFAULT_TAU,
            critic_iterations: DEFAULT_CRITIC_ITERATIONS,
            critic: true,
            context_capacity: p.context_capacity,
            max_restarts: p.max_restarts,
            call_ceiling: DEFAULT_CALL_CEILING,
            memory: MemorySettings::default(),
            solver: SolveConfig::default(),
            executor: ExecutionSettings::default(),
            debugger: DebuggerSettings::default(),
            live: LiveConfig::default(),
        }
    }
}

/// Overlay `patch` onto `base`: objects merge key by key, anything else
/// replaces.
pub fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k.clone()).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p.clone(),
    }
}

impl Config {
    /// Defaults overlaid with each layer in turn.
    pub fn layered(layers: &[Value]) -> Result<Config, String> {
        let mut v = serde_json::to_value(Config::default()).expect("config serializes");
        for layer in layers {
            if !layer.is_object() {
                return Err("configuration must be a JSON object".to_string());
            }
            merge(&mut v, layer);
        }
        serde_json::from_value(v).map_err(|e| format!("invalid configuration: {e}"))
    }

    pub fn read_layer(path: &Path) -> Result<Value, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| format!("{} is not valid JSON: {e}", path.display()))
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            model: self.model.clone(),
            temperature: self.temperature,
            correction_limit: self.correction_limit,
            tau: self.tau,
            critic_iterations: self.critic_iterations,
            critic: self.critic,
            context_capacity: self.context_capacity,
            memory_k: self.memory.k,
            memory_threshold: self.memory.threshold,
            max_restarts: self.max_restarts,
        }
    }

    pub fn executor(&self) -> ExecutorConfig {
        ExecutorConfig {
            model: self.model.clone(),
            temperature: self.temperature,
            step_budget: self.executor.step_budget,
            retry_budget: self.executor.retry_budget,
        }
    }

    pub fn abstraction(&self) -> AbstractionConfig {
        AbstractionConfig {
            model: self.model.clone(),
            temperature: self.temperature,
        }
    }

    pub fn debug(&self) -> DebugConfig {
        DebugConfig {
            model: self.model.clone(),
            temperature: self.temperature,
            k: self.debugger.k,
        }
    }

    pub fn check(&self) -> Result<(), String> {
        self.pipeline().check()?;
        self.solver.check()?;
        if self.call_ceiling == 0 {
            return Err("call ceiling must be at least 1".to_string());
        }
        if self.executor.step_budget == 0 {
            return Err("executor step budget must be at least 1".to_string());
        }
        if self.debugger.k == 0 {
            return Err("debugger k must be at least 1".to_string());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn layers_override_in_order() {
        let c = Config::layered(&[json!({"tau": 0.5, "memory": {"k": 5}}), json!({"tau": 0.9})])
            .unwrap();
        assert_eq!(c.tau, 0.9);
        assert_eq!(c.memory.k, 5);
        assert_eq!(c.memory.threshold, DEFAULT_THRESHOLD);
        assert_eq!(c.call_ceiling, 60);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_refused() {
        assert!(Config::layered(&[json!({"tua": 0.5})]).is_err());
        assert!(Config::layered(&[json!({"temperature": 3.0})])
            .unwrap()
            .check()
            .is_err());
        assert!(Config::layered(&[json!([1])]).is_err());
    }
}
