//! Delete-relaxation heuristics over boolean and numeric facts.
//!
//! Negative literals are treated as facts of their own, reached by actions
//! that delete the atom. Numeric comparisons become facts once the relaxed
//! value intervals of their variables allow them; intervals only ever widen,
//! an `increase` by a possibly positive amount opens the upper bound to
//! infinity and so on.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::task::{GroundTask, LinExpr, NumCond, NumEffect, SearchState};
use crate::ir::{CmpOp, NumericOp};
use crate::number::Number;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    /// Additive; informative but not admissible.
    #[default]
    HAdd,
    /// Max-cost; admissible, so A* with it returns shortest plans.
    HMax,
    /// 0 on goal states and 1 elsewhere.
    Blind,
}

impl Heuristic {
    pub fn name(self) -> &'static str {
        match self {
            Heuristic::HAdd => "h_add",
            Heuristic::HMax => "h_max",
            Heuristic::Blind => "blind",
        }
    }
}

/// Relaxed interval; `None` bounds are infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    lo: Option<Number>,
    hi: Option<Number>,
}

impl Interval {
    fn point(v: Number) -> Self {
        Interval {
            lo: Some(v),
            hi: Some(v),
        }
    }

    fn can_be_positive(&self) -> bool {
        self.hi.is_none_or(|h| h.is_positive())
    }

    fn can_be_negative(&self) -> bool {
        self.lo.is_none_or(|l| l.is_negative())
    }
}

fn eval_interval(e: &LinExpr, vars: &[Interval]) -> Interval {
    let mut lo = Some(e.constant);
    let mut hi = Some(e.constant);
    for (v, c) in &e.terms {
        let iv = vars[*v];
        let (a, b) = if c.is_positive() {
            (iv.lo.map(|x| x * *c), iv.hi.map(|x| x * *c))
        } else {
            (iv.hi.map(|x| x * *c), iv.lo.map(|x| x * *c))
        };
        lo = lo.zip(a).map(|(x, y)| x + y);
        hi = hi.zip(b).map(|(x, y)| x + y);
    }
    Interval { lo, hi }
}

fn relaxed_holds(c: &NumCond, vars: &[Interval]) -> bool {
    let iv = eval_interval(&c.expr, vars);
    let zero = Number::ZERO;
    match c.op {
        CmpOp::Lt => iv.lo.is_none_or(|l| l < zero),
        CmpOp::Le => iv.lo.is_none_or(|l| l <= zero),
        CmpOp::Gt => iv.hi.is_none_or(|h| h > zero),
        CmpOp::Ge => iv.hi.is_none_or(|h| h >= zero),
        CmpOp::Eq => iv.lo.is_none_or(|l| l <= zero) && iv.hi.is_none_or(|h| h >= zero),
    }
}

/// Widen `vars` by one application of `e`. Returns whether anything changed.
fn widen(e: &NumEffect, vars: &mut [Interval]) -> bool {
    let v = eval_interval(&e.value, vars);
    let before = vars[e.target];
    let t = &mut vars[e.target];
    match e.op {
        NumericOp::Increase | NumericOp::Decrease => {
            let (up, down) = if e.op == NumericOp::Increase {
                (v.can_be_positive(), v.can_be_negative())
            } else {
                (v.can_be_negative(), v.can_be_positive())
            };
            if up {
                t.hi = None;
            }
            if down {
                t.lo = None;
            }
        }
        NumericOp::Assign => {
            t.lo = t.lo.zip(v.lo).map(|(a, b)| a.min(b));
            t.hi = t.hi.zip(v.hi).map(|(a, b)| a.max(b));
        }
    }
    *t != before
}

/// Rounds of effect re-application before all touched variables are
/// opened to the full line.
const WIDEN_ROUNDS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    Fact(usize),
    Action(usize),
}

/// Per-task indices for fast repeated heuristic evaluation.
#[derive(Debug, Clone)]
pub struct Relaxation {
    atoms: usize,
    /// Actions that list a fact among their preconditions.
    consumers: Vec<Vec<usize>>,
    pre_facts: Vec<Vec<usize>>,
    goal: Vec<Vec<usize>>,
}

impl Relaxation {
    pub fn new(task: &GroundTask) -> Self {
        let n = task.atoms.len();
        let facts = 2 * n + task.conditions.len();
        let conj_facts = |c: &super::task::Conjunction| -> Vec<usize> {
            c.pos
                .iter()
                .copied()
                .chain(c.neg.iter().map(|p| n + p))
                .chain(c.num.iter().map(|k| 2 * n + k))
                .collect()
        };
        let mut consumers = vec![Vec::new(); facts];
        let mut pre_facts = Vec::with_capacity(task.actions.len());
        for (i, a) in task.actions.iter().enumerate() {
            let pf = conj_facts(&a.pre);
            for &f in &pf {
                consumers[f].push(i);
            }
            pre_facts.push(pf);
        }
        Relaxation {
            atoms: n,
            consumers,
            pre_facts,
            goal: task.goal.iter().map(conj_facts).collect(),
        }
    }

    /// Relaxed goal cost from `state`; `None` means unreachable even in
    /// the relaxation.
    pub fn evaluate(&self, task: &GroundTask, state: &SearchState, kind: Heuristic) -> Option<u64> {
        match kind {
            Heuristic::Blind => {
                if self.goal.is_empty() {
                    None
                } else if task.is_goal(state) {
                    Some(0)
                } else {
                    Some(1)
                }
            }
            Heuristic::HAdd => self.explore(task, state, |a, b| a + b),
            Heuristic::HMax => self.explore(task, state, u64::max),
        }
    }

    fn explore(
        &self,
        task: &GroundTask,
        state: &SearchState,
        combine: impl Fn(u64, u64) -> u64,
    ) -> Option<u64> {
        if self.goal.is_empty() {
            return None;
        }
        let n = self.atoms;
        let facts = self.consumers.len();
        let mut cost: Vec<Option<u64>> = vec![None; facts];
        let mut queued_cond = vec![false; task.conditions.len()];
        let mut unsat: Vec<usize> = self.pre_facts.iter().map(Vec::len).collect();
        let mut acc = vec![0u64; task.actions.len()];
        let mut fired = vec![false; task.actions.len()];
        let mut fired_numeric: Vec<usize> = Vec::new();
        let mut vars: Vec<Interval> = state.values.iter().map(|v| Interval::point(*v)).collect();
        let mut queue: BinaryHeap<Reverse<(u64, Event)>> = BinaryHeap::new();

        for p in 0..n {
            let f = if state.has(p) { p } else { n + p };
            queue.push(Reverse((0, Event::Fact(f))));
        }
        for (k, c) in task.conditions.iter().enumerate() {
            if relaxed_holds(c, &vars) {
                queued_cond[k] = true;
                queue.push(Reverse((0, Event::Fact(2 * n + k))));
            }
        }
        for (i, pf) in self.pre_facts.iter().enumerate() {
            if pf.is_empty() {
                queue.push(Reverse((0, Event::Action(i))));
            }
        }

        let goal_facts: std::collections::BTreeSet<usize> =
            self.goal.iter().flatten().copied().collect();
        let mut goal_open = goal_facts.len();

        while let Some(Reverse((c, ev))) = queue.pop() {
            match ev {
                Event::Fact(f) => {
                    if cost[f].is_some() {
                        continue;
                    }
                    cost[f] = Some(c);
                    if goal_facts.contains(&f) {
                        goal_open -= 1;
                        if goal_open == 0 {
                            break;
                        }
                    }
                    for &a in &self.consumers[f] {
                        unsat[a] -= 1;
                        acc[a] = combine(acc[a], c);
                        if unsat[a] == 0 {
                            queue.push(Reverse((acc[a], Event::Action(a))));
                        }
                    }
                }
                Event::Action(a) => {
                    if fired[a] {
                        continue;
                    }
                    fired[a] = true;
                    let action = &task.actions[a];
                    for &p in &action.add {
                        if cost[p].is_none() {
                            queue.push(Reverse((c + 1, Event::Fact(p))));
                        }
                    }
                    for &p in &action.del {
                        if cost[n + p].is_none() {
                            queue.push(Reverse((c + 1, Event::Fact(n + p))));
                        }
                    }
                    if action.num.is_empty() {
                        continue;
                    }
                    fired_numeric.push(a);
                    let mut stable = false;
                    for _ in 0..WIDEN_ROUNDS {
                        let mut changed = false;
                        for &b in &fired_numeric {
                            for e in &task.actions[b].num {
                                changed |= widen(e, &mut vars);
                            }
                        }
                        if !changed {
                            stable = true;
                            break;
                        }
                    }
                    if !stable {
                        for &b in &fired_numeric {
                            for e in &task.actions[b].num {
                                vars[e.target] = Interval { lo: None, hi: None };
                            }
                        }
                    }
                    for (k, cond) in task.conditions.iter().enumerate() {
                        if !queued_cond[k] && relaxed_holds(cond, &vars) {
                            queued_cond[k] = true;
                            queue.push(Reverse((c + 1, Event::Fact(2 * n + k))));
                        }
                    }
                }
            }
        }

        self.goal
            .iter()
            .filter_map(|g| {
                g.iter()
                    .try_fold(0u64, |acc, f| cost[*f].map(|c| combine(acc, c)))
            })
            .min()
    }
}

pub fn h_add(task: &GroundTask, state: &SearchState) -> Option<u64> {
    Relaxation::new(task).evaluate(task, state, Heuristic::HAdd)
}

pub fn h_max(task: &GroundTask, state: &SearchState) -> Option<u64> {
    Relaxation::new(task).evaluate(task, state, Heuristic::HMax)
}
