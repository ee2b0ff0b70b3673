//! Process exit codes and the machine-readable run record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Every way a command can end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exit {
    /// 0: the command did what was asked.
    Ok,
    /// 2: the problem has no plan, or the solver ran out of budget.
    Unsolvable,
    /// 3: execution was aborted by the validator.
    Abort,
    /// 64: bad flags, configuration or input files.
    Config,
    /// 65: generation or interaction failed (user answers exhausted,
    /// correction limit reached without a verified repair, call ceiling).
    Generation,
    /// 70: an internal inconsistency, including replay divergence.
    Internal,
}

impl Exit {
    pub fn code(self) -> i32 {
        match self {
            Exit::Ok => 0,
            Exit::Unsolvable => 2,
            Exit::Abort => 3,
            Exit::Config => 64,
            Exit::Generation => 65,
            Exit::Internal => 70,
        }
    }
}

/// Written as `record.json` in every run directory, and printed when a
/// command fails before a directory exists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub exit: Exit,
    pub exit_code: i32,
    pub message: String,
    #[serde(default)]
    pub details: BTreeMap<String, Value>,
}

impl RunRecord {
    pub fn new(command: &str, exit: Exit, message: impl Into<String>) -> Self {
        RunRecord {
            command: command.to_string(),
            exit,
            exit_code: exit.code(),
            message: message.into(),
            details: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.details.insert(
            key.to_string(),
            serde_json::to_value(value).expect("detail serializes"),
        );
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }
}
