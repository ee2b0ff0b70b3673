use std::fmt;

use serde::{Deserialize, Serialize};

/// One ground action of a plan, e.g. `stack(b1, b2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanStep {
    pub action: String,
    #[serde(default)]
    pub args: Vec<String>,
}

impl PlanStep {
    pub fn new(action: &str, args: Vec<String>) -> Self {
        PlanStep {
            action: action.to_string(),
            args,
        }
    }
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.action, self.args.join(", "))
    }
}

/// A sequential plan. When present, `cost` equals the number of steps
/// since every action has unit cost.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Plan {
    pub steps: Vec<PlanStep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<u64>,
}

impl Plan {
    pub fn new(steps: Vec<PlanStep>) -> Self {
        Plan { steps, cost: None }
    }

    /// Plan with its unit cost filled in.
    pub fn with_cost(steps: Vec<PlanStep>) -> Self {
        let cost = Some(steps.len() as u64);
        Plan { steps, cost }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// One step per line, readable back with [`crate::pddl::parse_plan`].
    pub fn to_text(&self) -> String {
        self.steps.iter().map(|s| format!("{s}\n")).collect()
    }
}
