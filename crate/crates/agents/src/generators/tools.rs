//! Tools offered to the initial-state and goal agents.

use crate::gateway::{ToolRegistry, ToolSchema};

pub const MISSING_FLUENT: &str = "missing_or_incorrect_fluent";
pub const ACTION_MODIFICATION: &str = "action_modification";
pub const MISSING_OBJECTS: &str = "missing_objects";
pub const ASK_USER: &str = "ask_user";
pub const STORE_MEMORY: &str = "store_memory";

pub fn missing_fluent() -> ToolSchema {
    ToolSchema::new(
        MISSING_FLUENT,
        "Report that the domain lacks a fluent, or declares one incorrectly, that is needed to describe the task.",
    )
    .string("fluent_name", "Name of the missing or incorrect fluent.")
    .string(
        "fluent_description",
        "Meaning of the fluent, its typed parameters and whether it is boolean or numeric.",
    )
}

pub fn action_modification() -> ToolSchema {
    ToolSchema::new(
        ACTION_MODIFICATION,
        "Request a change to an action's preconditions or effects so the task can be expressed.",
    )
    .string("action_name", "Name of the action to change.")
    .string("change_description", "What must change and why.")
}

pub fn missing_objects() -> ToolSchema {
    ToolSchema::new(
        MISSING_OBJECTS,
        "Report that the goal refers to objects that the initial state does not declare.",
    )
    .string("object_type", "Domain type of the missing objects.")
    .string(
        "object_description",
        "Which objects are missing and what is known about them.",
    )
}

pub fn ask_user() -> ToolSchema {
    ToolSchema::new(
        ASK_USER,
        "Ask the user one question about the task and wait for the answer.",
    )
    .string("question", "The question, phrased for a person.")
}

pub fn store_memory() -> ToolSchema {
    ToolSchema::new(
        STORE_MEMORY,
        "Save a generalizable correction to long-term memory. Use only when the user asks to remember something.",
    )
    .string("summary", "Short, general statement of the correction.")
}

pub fn init_tools() -> ToolRegistry {
    ToolRegistry::from_tools([
        missing_fluent(),
        action_modification(),
        ask_user(),
        store_memory(),
    ])
    .expect("tool names are distinct")
}

pub fn goal_tools() -> ToolRegistry {
    ToolRegistry::from_tools([
        missing_fluent(),
        action_modification(),
        missing_objects(),
        store_memory(),
    ])
    .expect("tool names are distinct")
}
