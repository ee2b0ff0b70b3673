//! Forward state-space search.

use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::heuristic::{Heuristic, Relaxation};
use super::plan::{Plan, PlanStep};
use super::task::{GroundTask, SearchState};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Order by `g + h`.
    #[default]
    Astar,
    /// Order by `h` alone.
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveConfig {
    pub strategy: Strategy,
    pub heuristic: Heuristic,
    /// Maximum number of node expansions.
    pub node_budget: u64,
    /// Wall-clock limit in seconds.
    pub time_budget_secs: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            strategy: Strategy::Astar,
            heuristic: Heuristic::HAdd,
            node_budget: 1_000_000,
            time_budget_secs: 60.0,
        }
    }
}

impl SolveConfig {
    /// A* with the admissible max-cost heuristic: shortest plans.
    pub fn optimal() -> Self {
        SolveConfig {
            heuristic: Heuristic::HMax,
            ..SolveConfig::default()
        }
    }

    pub fn check(&self) -> Result<(), String> {
        if self.node_budget == 0 {
            return Err("node budget must be positive".to_string());
        }
        if !(self.time_budget_secs > 0.0 && self.time_budget_secs.is_finite()) {
            return Err("time budget must be a positive number of seconds".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "plan", rename_all = "kebab-case")]
pub enum Outcome {
    Plan(Plan),
    Unsolvable,
    BudgetExhausted,
}

impl Outcome {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            Outcome::Plan(p) => Some(p),
            _ => None,
        }
    }
}

/// Outcome plus search statistics. Timing is deliberately absent so that
/// reports serialize identically across runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub expanded: u64,
    pub generated: u64,
}

struct Node {
    state: SearchState,
    parent: Option<usize>,
    action: Option<usize>,
    g: u64,
}

/// Search for a plan. Ties on the priority key are broken first in, first
/// out, so the result is a function of `(task, cfg)` alone unless the time
/// budget fires.
pub fn solve(task: &GroundTask, cfg: &SolveConfig) -> SolveReport {
    let start = Instant::now();
    let deadline = Duration::from_secs_f64(cfg.time_budget_secs.max(0.0));
    let relax = Relaxation::new(task);
    let mut expanded = 0u64;
    let mut generated = 0u64;
    let done = |outcome, expanded, generated| SolveReport {
        outcome,
        expanded,
        generated,
    };

    let Some(h0) = relax.evaluate(task, &task.init, cfg.heuristic) else {
        return done(Outcome::Unsolvable, 0, 0);
    };
    let key = |g: u64, h: u64| match cfg.strategy {
        Strategy::Astar => g + h,
        Strategy::Greedy => h,
    };

    let mut nodes = vec![Node {
        state: task.init.clone(),
        parent: None,
        action: None,
        g: 0,
    }];
    let mut best_g: HashMap<SearchState, u64> = HashMap::new();
    best_g.insert(task.init.clone(), 0);
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    open.push(Reverse((key(0, h0), seq, 0usize)));

    while let Some(Reverse((_, _, id))) = open.pop() {
        let g = nodes[id].g;
        if best_g.get(&nodes[id].state).is_some_and(|&b| b < g) {
            continue;
        }
        if task.is_goal(&nodes[id].state) {
            return done(
                Outcome::Plan(extract(task, &nodes, id)),
                expanded,
                generated,
            );
        }
        if expanded >= cfg.node_budget
            || (expanded.is_multiple_of(256) && start.elapsed() > deadline)
        {
            return done(Outcome::BudgetExhausted, expanded, generated);
        }
        expanded += 1;

        for (ai, action) in task.actions.iter().enumerate() {
            if !task.applicable(&nodes[id].state, action) {
                continue;
            }
            let child = task.apply(&nodes[id].state, action);
            generated += 1;
            let cg = g + 1;
            match best_g.entry(child.clone()) {
                Entry::Occupied(mut e) => {
                    if *e.get() <= cg {
                        continue;
                    }
                    e.insert(cg);
                }
                Entry::Vacant(e) => {
                    e.insert(cg);
                }
            }
            let Some(h) = relax.evaluate(task, &child, cfg.heuristic) else {
                continue;
            };
            nodes.push(Node {
                state: child,
                parent: Some(id),
                action: Some(ai),
                g: cg,
            });
            seq += 1;
            open.push(Reverse((key(cg, h), seq, nodes.len() - 1)));
        }
    }
    done(Outcome::Unsolvable, expanded, generated)
}

fn extract(task: &GroundTask, nodes: &[Node], mut id: usize) -> Plan {
    let mut steps = Vec::new();
    while let (Some(parent), Some(a)) = (nodes[id].parent, nodes[id].action) {
        let action = &task.actions[a];
        steps.push(PlanStep::new(&action.schema, action.args.clone()));
        id = parent;
    }
    steps.reverse();
    Plan::with_cost(steps)
}
