//! Plan validation by direct simulation of the lifted model.
//!
//! This path never touches the grounder or the search code, so it can
//! check their output independently.

use serde::{Deserialize, Serialize};

use super::plan::Plan;
use crate::ir::{self, Assignment, Binding, Effect, EvalError, NumericOp, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Valid {
        final_state: Assignment,
    },
    /// `step` is 0-based; a failing goal reports `step == plan.len()`.
    Invalid {
        step: usize,
        condition: String,
    },
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid { .. })
    }
}

fn invalid(step: usize, condition: impl Into<String>) -> Verdict {
    Verdict::Invalid {
        step,
        condition: condition.into(),
    }
}

fn describe(e: EvalError) -> String {
    e.to_string()
}

/// Apply one action's effects. Right-hand sides read the old state,
/// deletes precede adds.
pub fn apply_effects(
    state: &Assignment,
    effects: &[Effect],
    binding: &Binding,
) -> Result<Assignment, EvalError> {
    let mut next = state.clone();
    let mut adds = Vec::new();
    for e in effects {
        match e {
            Effect::Set { atom, value } => {
                let a = ir::ground_app(atom, binding)?;
                if *value {
                    adds.push(a);
                } else {
                    next.atoms.remove(&a);
                }
            }
            Effect::Numeric { op, target, value } => {
                let t = ir::ground_app(target, binding)?;
                let v = ir::eval_term(value, binding, state)?;
                let new = match op {
                    NumericOp::Assign => v,
                    NumericOp::Increase | NumericOp::Decrease => {
                        let cur = state
                            .value(&t)
                            .ok_or_else(|| EvalError::Uninitialized(t.clone()))?;
                        if *op == NumericOp::Increase {
                            cur + v
                        } else {
                            cur - v
                        }
                    }
                };
                next.numeric.insert(t, new);
            }
        }
    }
    next.atoms.extend(adds);
    Ok(next)
}

/// Simulate `plan` from the problem's initial state and check the goal.
pub fn validate_plan(problem: &ProblemInstance, plan: &Plan) -> Verdict {
    let domain = &problem.domain;
    let mut state = problem.init.clone();
    for (i, step) in plan.steps.iter().enumerate() {
        let Some(schema) = domain.action(&step.action) else {
            return invalid(i, format!("unknown action `{}`", step.action));
        };
        if schema.parameters.len() != step.args.len() {
            return invalid(
                i,
                format!(
                    "`{}` takes {} argument(s), got {}",
                    step.action,
                    schema.parameters.len(),
                    step.args.len()
                ),
            );
        }
        for (p, a) in schema.parameters.iter().zip(&step.args) {
            match problem.object_type(a) {
                None => return invalid(i, format!("unknown object `{a}`")),
                Some(ty) if !domain.is_subtype(ty, &p.ty) => {
                    return invalid(i, format!("object `{a}` is not a `{}`", p.ty))
                }
                Some(_) => {}
            }
        }
        let binding: Binding = schema
            .parameters
            .iter()
            .map(|p| p.name.clone())
            .zip(step.args.iter().cloned())
            .collect();
        match ir::first_violated(&schema.precondition, &binding, &state) {
            Ok(None) => {}
            Ok(Some(c)) => return invalid(i, c.to_string()),
            Err(e) => return invalid(i, describe(e)),
        }
        state = match apply_effects(&state, &schema.effects, &binding) {
            Ok(s) => s,
            Err(e) => return invalid(i, describe(e)),
        };
    }
    match ir::first_violated(&problem.goal, &Binding::new(), &state) {
        Ok(None) => Verdict::Valid { final_state: state },
        Ok(Some(c)) => invalid(plan.steps.len(), c.to_string()),
        Err(e) => invalid(plan.steps.len(), describe(e)),
    }
}
