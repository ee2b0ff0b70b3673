//! Planning core: a neutral domain IR, a PDDL codec for the supported
//! subset, a grounded forward-search planner with numeric fluents and a
//! deterministic text world used to execute household plans.

pub mod ir;
pub mod number;
pub mod pddl;
pub mod planner;
pub mod world;

pub use number::Number;
