//! Environments the executor acts in.

use adaplan_core::ir::Expr;
use adaplan_core::world::WorldState;
use serde::{Deserialize, Serialize};

use crate::gateway::ToolSchema;

/// The result of dispatching one skill.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub text: String,
    pub success: bool,
}

/// Something with skills, a describable state and a goal check.
pub trait Environment {
    /// Skills offered to the executor. Names are unique and descriptions
    /// nonempty.
    fn skills(&self) -> Vec<ToolSchema>;
    /// Current state in natural language.
    fn describe(&self) -> String;
    /// Run a skill. `Err` means the invocation was refused outright (for
    /// example an unknown entity) and nothing changed.
    fn apply(&mut self, skill: &str, args: &[String]) -> Result<Observation, String>;
    fn check_goal(&self, goal: &Expr) -> Result<bool, String>;
}

/// Parameter names and descriptions of the household skills.
const SKILL_TABLE: &[(&str, &str, &[(&str, &str)])] = &[
    (
        "walk_to",
        "Walk to a room, or to the room where an object is.",
        &[("target", "room or object id")],
    ),
    (
        "open",
        "Open an openable object such as a fridge or cabinet.",
        &[("target", "object id")],
    ),
    ("close", "Close an open object.", &[("target", "object id")]),
    (
        "grab",
        "Pick up an object with a free hand.",
        &[("target", "object id")],
    ),
    (
        "put_on",
        "Place a held object on a surface such as a table.",
        &[("object", "held object id"), ("surface", "surface id")],
    ),
    (
        "put_in",
        "Place a held object inside an open container or appliance.",
        &[("object", "held object id"), ("container", "container id")],
    ),
    (
        "heat",
        "Heat an object that is inside a heater such as a microwave.",
        &[("object", "object id")],
    ),
];

/// Tool schemas for the household skills.
pub fn household_skills() -> Vec<ToolSchema> {
    SKILL_TABLE
        .iter()
        .map(|(name, description, params)| {
            params
                .iter()
                .fold(ToolSchema::new(name, description), |t, (p, d)| {
                    t.string(p, d)
                })
        })
        .collect()
}

/// The text household behind the [`Environment`] interface.
#[derive(Debug, Clone, PartialEq)]
pub struct TextWorldEnv {
    pub state: WorldState,
    /// Describe only what the agent can see from where it stands.
    pub agent_centric: bool,
}

impl TextWorldEnv {
    pub fn new(state: WorldState) -> Self {
        TextWorldEnv {
            state,
            agent_centric: false,
        }
    }
}

impl Environment for TextWorldEnv {
    fn skills(&self) -> Vec<ToolSchema> {
        household_skills()
    }

    fn describe(&self) -> String {
        self.state.describe_state(self.agent_centric)
    }

    fn apply(&mut self, skill: &str, args: &[String]) -> Result<Observation, String> {
        let (result, next) = self
            .state
            .apply_skill(skill, args)
            .map_err(|e| e.to_string())?;
        self.state = next;
        Ok(Observation {
            text: result.observation,
            success: result.success,
        })
    }

    fn check_goal(&self, goal: &Expr) -> Result<bool, String> {
        self.state.check_goal(goal).map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use adaplan_core::world::SKILLS;

    #[test]
    fn skill_table_matches_the_world() {
        let names: Vec<String> = household_skills().into_iter().map(|t| t.name).collect();
        assert_eq!(names, SKILLS);
        let state =
            WorldState::from_json(include_str!("../../../../data/worlds/kitchen.json")).unwrap();
        for t in household_skills() {
            assert!(!t.description.is_empty());
            // Arity agrees with the world: one argument too few is refused.
            let args = vec!["fridge_305".to_string(); t.parameters.len() - 1];
            assert!(state.apply_skill(&t.name, &args).is_err(), "{}", t.name);
        }
    }
}
