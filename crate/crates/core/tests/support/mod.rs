//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls the grounder, heuristics or search code under test.

#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};
use std::path::PathBuf;

use adaplan_core::ir::{
    self, Assignment, Binding, DomainModel, Effect, NumericOp, ProblemInstance,
};
use adaplan_core::pddl;
use adaplan_core::planner::{GroundTask, SearchState};

pub const DOMAINS: &[&str] = &[
    "barman",
    "blocksworld",
    "floortile",
    "grippers",
    "storage",
    "termes",
    "tyreworld",
];

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn read(rel: &str) -> String {
    let p = data_dir().join(rel);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("reading {}: {e}", p.display()))
}

pub fn benchmark_domain(name: &str) -> DomainModel {
    pddl::parse_domain(&read(&format!("benchmarks/{name}/domain.pddl")))
        .unwrap_or_else(|e| panic!("{name}/domain.pddl:{e}"))
}

/// The 20 problems of a benchmark domain, as `(file name, text)`.
pub fn benchmark_problems(name: &str) -> Vec<(String, String)> {
    let dir = data_dir().join("benchmarks").join(name);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| {
            p.file_name().is_some_and(|f| f != "domain.pddl")
                && p.extension().is_some_and(|e| e == "pddl")
        })
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read_to_string(&p).unwrap(),
            )
        })
        .collect()
}

pub fn benchmark_problem(domain: &DomainModel, name: &str, file: &str) -> ProblemInstance {
    pddl::parse_problem(&read(&format!("benchmarks/{name}/{file}")), domain)
        .unwrap_or_else(|e| panic!("{name}/{file}:{e}"))
}

/// Successor of `state` under one action instance, written out from the
/// PDDL semantics: every right-hand side reads the old state, deletes are
/// applied before adds.
fn successor(state: &Assignment, effects: &[Effect], binding: &Binding) -> Option<Assignment> {
    let mut next = state.clone();
    let mut adds = Vec::new();
    for e in effects {
        match e {
            Effect::Set { atom, value } => {
                let a = ir::ground_app(atom, binding).ok()?;
                if *value {
                    adds.push(a);
                } else {
                    next.atoms.remove(&a);
                }
            }
            Effect::Numeric { op, target, value } => {
                let t = ir::ground_app(target, binding).ok()?;
                let v = ir::eval_term(value, binding, state).ok()?;
                let old = state.numeric.get(&t).copied();
                let new = match op {
                    NumericOp::Assign => v,
                    NumericOp::Increase => old? + v,
                    NumericOp::Decrease => old? - v,
                };
                next.numeric.insert(t, new);
            }
        }
    }
    next.atoms.extend(adds);
    Some(next)
}

pub enum BfsResult {
    Shortest(usize),
    Unsolvable,
    TooLarge,
}

/// Breadth-first search over lifted states. Gives up after `limit`
/// distinct states.
pub fn bfs(problem: &ProblemInstance, limit: usize) -> BfsResult {
    let domain = &problem.domain;
    let instances: Vec<(&ir::ActionSchema, Binding)> = domain
        .actions
        .iter()
        .flat_map(|a| {
            ir::instantiations(domain, &problem.objects, &a.parameters)
                .into_iter()
                .map(move |args| {
                    let b: Binding = a
                        .parameters
                        .iter()
                        .map(|p| p.name.clone())
                        .zip(args)
                        .collect();
                    (a, b)
                })
        })
        .collect();
    let goal_holds =
        |s: &Assignment| ir::eval_expr(&problem.goal, &Binding::new(), s).unwrap_or(false);

    let mut seen: HashMap<Assignment, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(problem.init.clone(), 0);
    queue.push_back(problem.init.clone());
    while let Some(s) = queue.pop_front() {
        let d = seen[&s];
        if goal_holds(&s) {
            return BfsResult::Shortest(d);
        }
        for (a, b) in &instances {
            if !ir::eval_expr(&a.precondition, b, &s).unwrap_or(false) {
                continue;
            }
            let Some(n) = successor(&s, &a.effects, b) else {
                continue;
            };
            if !seen.contains_key(&n) {
                if seen.len() >= limit {
                    return BfsResult::TooLarge;
                }
                seen.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    BfsResult::Unsolvable
}

/// Max-cost relaxation by plain fixpoint iteration over a boolean ground
/// task. `None` is infinite.
pub fn h_max_fixpoint(task: &GroundTask, state: &SearchState) -> Option<u64> {
    assert!(
        task.conditions.is_empty(),
        "oracle covers boolean tasks only"
    );
    let n = task.atoms.len();
    let mut pos: Vec<Option<u64>> = (0..n).map(|p| state.has(p).then_some(0)).collect();
    let mut neg: Vec<Option<u64>> = (0..n).map(|p| (!state.has(p)).then_some(0)).collect();
    let conj_cost =
        |c: &adaplan_core::planner::Conjunction, pos: &[Option<u64>], neg: &[Option<u64>]| {
            let mut m = 0u64;
            for &p in &c.pos {
                m = m.max(pos[p]?);
            }
            for &p in &c.neg {
                m = m.max(neg[p]?);
            }
            Some(m)
        };
    loop {
        let mut changed = false;
        for a in &task.actions {
            let Some(c) = conj_cost(&a.pre, &pos, &neg) else {
                continue;
            };
            for &p in &a.add {
                if pos[p].is_none_or(|old| c + 1 < old) {
                    pos[p] = Some(c + 1);
                    changed = true;
                }
            }
            for &p in &a.del {
                if neg[p].is_none_or(|old| c + 1 < old) {
                    neg[p] = Some(c + 1);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    task.goal
        .iter()
        .filter_map(|g| conj_cost(g, &pos, &neg))
        .min()
}

/// States reached by random walks from the initial state.
pub fn random_states(task: &GroundTask, count: usize, seed: u64) -> Vec<SearchState> {
    let mut rng = seed;
    let mut next = move || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        rng
    };
    let mut out = Vec::new();
    while out.len() < count {
        let mut s = task.init.clone();
        let steps = next() % 12;
        for _ in 0..steps {
            let app: Vec<_> = task
                .actions
                .iter()
                .filter(|a| task.applicable(&s, a))
                .collect();
            if app.is_empty() {
                break;
            }
            s = task.apply(&s, app[(next() as usize) % app.len()]);
        }
        out.push(s);
    }
    out
}
