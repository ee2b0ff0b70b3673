//! Built-in planner: grounding, heuristic forward search over boolean and
//! numeric states, and an independent plan validator.
//!
//! ```
//! use adaplan_core::pddl::{parse_domain, parse_problem};
//! use adaplan_core::planner::{ground, solve, validate_plan, SolveConfig};
//!
//! let domain = parse_domain(
//!     "(define (domain d) (:predicates (p) (q))
//!        (:action a :parameters () :precondition (p) :effect (and (q))))",
//! ).unwrap();
//! let problem = parse_problem(
//!     "(define (problem x) (:domain d) (:init (p)) (:goal (q)))",
//!     &domain,
//! ).unwrap();
//! let task = ground(&problem).unwrap();
//! let report = solve(&task, &SolveConfig::default());
//! let plan = report.outcome.plan().unwrap();
//! assert_eq!(plan.to_text(), "a()\n");
//! assert!(validate_plan(&problem, plan).is_valid());
//! ```

mod heuristic;
mod plan;
mod search;
mod task;
mod validate;

pub use heuristic::{h_add, h_max, Heuristic, Relaxation};
pub use plan::{Plan, PlanStep};
pub use search::{solve, Outcome, SolveConfig, SolveReport, Strategy};
pub use task::{
    ground, Conjunction, GroundAction, GroundError, GroundTask, LinExpr, NumCond, NumEffect,
    SearchState,
};
pub use validate::{apply_effects, validate_plan, Verdict};
