//! LLM-facing half of adaplan: the chat gateway, agent memory, the
//! generator agents that build planning problems from natural language,
//! the retrieval-assisted debugger, plan-to-instruction translation and
//! the skill executor.

pub mod abstraction;
pub mod debugger;
pub mod executor;
pub mod gateway;
pub mod generators;
pub mod memory;
