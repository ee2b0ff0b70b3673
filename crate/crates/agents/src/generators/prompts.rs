//! System prompts, versioned with the fixtures that were recorded against
//! them. Any edit changes request fingerprints and requires re-recording.

pub const DOMAIN: &str = include_str!("../../../../data/prompts/domain.md");
pub const INIT: &str = include_str!("../../../../data/prompts/init.md");
pub const GOAL: &str = include_str!("../../../../data/prompts/goal.md");
pub const CRITIC: &str = include_str!("../../../../data/prompts/critic.md");
pub const ABSTRACTION: &str = include_str!("../../../../data/prompts/abstraction.md");
pub const EXECUTOR: &str = include_str!("../../../../data/prompts/executor.md");
pub const VALIDATOR: &str = include_str!("../../../../data/prompts/validator.md");
pub const DEBUGGER: &str = include_str!("../../../../data/prompts/debugger.md");
