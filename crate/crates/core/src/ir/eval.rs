//! Direct evaluation of conditions against a concrete state.

use std::collections::BTreeMap;

use super::expr::{Arg, Expr, FluentApp, Term};
use super::model::{Assignment, GroundAtom};
use crate::number::Number;

/// Read access to a concrete state.
pub trait StateView {
    fn holds(&self, atom: &GroundAtom) -> bool;
    fn value(&self, atom: &GroundAtom) -> Option<Number>;
}

impl StateView for Assignment {
    fn holds(&self, atom: &GroundAtom) -> bool {
        Assignment::holds(self, atom)
    }

    fn value(&self, atom: &GroundAtom) -> Option<Number> {
        Assignment::value(self, atom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("variable `?{0}` is unbound")]
    Unbound(String),
    #[error("numeric atom `{0}` has no value")]
    Uninitialized(GroundAtom),
}

/// Variable binding, parameter name to object name.
pub type Binding = BTreeMap<String, String>;

pub fn ground_app(app: &FluentApp, binding: &Binding) -> Result<GroundAtom, EvalError> {
    let args = app
        .args
        .iter()
        .map(|a| match a {
            Arg::Obj(o) => Ok(o.clone()),
            Arg::Var(v) => binding
                .get(v)
                .cloned()
                .ok_or_else(|| EvalError::Unbound(v.clone())),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroundAtom {
        fluent: app.fluent.clone(),
        args,
    })
}

pub fn eval_term(
    term: &Term,
    binding: &Binding,
    state: &impl StateView,
) -> Result<Number, EvalError> {
    Ok(match term {
        Term::Const(c) => *c,
        Term::Fluent(app) => {
            let atom = ground_app(app, binding)?;
            state.value(&atom).ok_or(EvalError::Uninitialized(atom))?
        }
        Term::Add(a, b) => eval_term(a, binding, state)? + eval_term(b, binding, state)?,
        Term::Sub(a, b) => eval_term(a, binding, state)? - eval_term(b, binding, state)?,
    })
}

pub fn eval_expr(
    expr: &Expr,
    binding: &Binding,
    state: &impl StateView,
) -> Result<bool, EvalError> {
    match expr {
        Expr::And(items) => {
            for e in items {
                if !eval_expr(e, binding, state)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Expr::Or(items) => {
            for e in items {
                if eval_expr(e, binding, state)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        Expr::Not(e) => Ok(!eval_expr(e, binding, state)?),
        Expr::Atom(app) => Ok(state.holds(&ground_app(app, binding)?)),
        Expr::Compare(op, l, r) => {
            let lv = eval_term(l, binding, state)?;
            let rv = eval_term(r, binding, state)?;
            Ok(op.holds(&lv, &rv))
        }
    }
}

/// First conjunct (recursing through nested `and`) that does not hold,
/// instantiated under the binding. `None` when the condition holds.
pub fn first_violated(
    expr: &Expr,
    binding: &Binding,
    state: &impl StateView,
) -> Result<Option<Expr>, EvalError> {
    for c in expr.conjuncts() {
        if !eval_expr(c, binding, state)? {
            let bound = c.map_args(&|a| match a {
                Arg::Var(v) => binding
                    .get(v)
                    .map(|o| Arg::Obj(o.clone()))
                    .unwrap_or_else(|| a.clone()),
                Arg::Obj(_) => a.clone(),
            });
            return Ok(Some(bound));
        }
    }
    Ok(None)
}
