//! Planner benchmarks over directories of PDDL files.
//!
//! A benchmark directory holds `domain.pddl` and problem files, or
//! subdirectories that each do. Files that fail to parse become rows with
//! a `parse-error` status rather than aborting the run.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use adaplan_core::pddl::{parse_domain, parse_problem};
use adaplan_core::planner::{ground, solve, validate_plan, Outcome, SolveConfig};
use serde::{Deserialize, Serialize};

pub const DOMAIN_FILE: &str = "domain.pddl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Plan,
    Unsolvable,
    BudgetExhausted,
    ParseError,
    GroundError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub domain: String,
    pub problem: String,
    pub status: RowStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<usize>,
    /// Whether the plan passed independent validation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub valid: Option<bool>,
    pub expanded: u64,
    pub generated: u64,
    /// Fastest of the repeated solves.
    pub millis: f64,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub error: String,
}

fn sorted(dir: &Path, keep: impl Fn(&Path) -> bool) -> Vec<PathBuf> {
    let Ok(entries) = std::fs::read_dir(dir) else {
        return Vec::new();
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| keep(p))
        .collect();
    paths.sort();
    paths
}

fn name(p: &Path) -> String {
    p.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn domain_dirs(dir: &Path) -> Vec<PathBuf> {
    if dir.join(DOMAIN_FILE).is_file() {
        return vec![dir.to_path_buf()];
    }
    sorted(dir, |p| p.join(DOMAIN_FILE).is_file())
}

/// Solve every problem under `dir`, each `repeat` times.
pub fn run(dir: &Path, cfg: &SolveConfig, repeat: usize) -> Vec<BenchRow> {
    let mut rows = Vec::new();
    for ddir in domain_dirs(dir) {
        let dname = name(&ddir);
        let problems = sorted(&ddir, |p| {
            p.extension().is_some_and(|e| e == "pddl")
                && p.file_name().is_some_and(|f| f != DOMAIN_FILE)
        });
        let row = |problem: &Path, status, error: String| BenchRow {
            domain: dname.clone(),
            problem: name(problem),
            status,
            length: None,
            valid: None,
            expanded: 0,
            generated: 0,
            millis: 0.0,
            error,
        };
        let domain = std::fs::read_to_string(ddir.join(DOMAIN_FILE))
            .map_err(|e| e.to_string())
            .and_then(|t| parse_domain(&t).map_err(|e| e.render(DOMAIN_FILE)));
        let domain = match domain {
            Ok(d) => d,
            Err(e) => {
                rows.extend(
                    problems
                        .iter()
                        .map(|p| row(p, RowStatus::ParseError, e.clone())),
                );
                continue;
            }
        };
        for ppath in &problems {
            let parsed = std::fs::read_to_string(ppath)
                .map_err(|e| e.to_string())
                .and_then(|t| parse_problem(&t, &domain).map_err(|e| e.render(&name(ppath))));
            let problem = match parsed {
                Ok(p) => p,
                Err(e) => {
                    rows.push(row(ppath, RowStatus::ParseError, e));
                    continue;
                }
            };
            let task = match ground(&problem) {
                Ok(t) => t,
                Err(e) => {
                    rows.push(row(ppath, RowStatus::GroundError, e.to_string()));
                    continue;
                }
            };
            let mut best = f64::INFINITY;
            let mut report = None;
            for _ in 0..repeat {
                let start = Instant::now();
                let r = solve(&task, cfg);
                best = best.min(start.elapsed().as_secs_f64() * 1000.0);
                report = Some(r);
            }
            let report = report.expect("repeat is at least 1");
            let mut r = row(ppath, RowStatus::Plan, String::new());
            r.expanded = report.expanded;
            r.generated = report.generated;
            r.millis = best;
            match &report.outcome {
                Outcome::Plan(plan) => {
                    r.length = Some(plan.len());
                    r.valid = Some(validate_plan(&problem, plan).is_valid());
                }
                Outcome::Unsolvable => r.status = RowStatus::Unsolvable,
                Outcome::BudgetExhausted => r.status = RowStatus::BudgetExhausted,
            }
            rows.push(r);
        }
    }
    rows
}

/// Fixed-width text table of `rows`.
pub fn table(rows: &[BenchRow]) -> String {
    let mut s = format!(
        "{:<12} {:<14} {:<17} {:>6} {:>6} {:>10} {:>10}\n",
        "domain", "problem", "status", "length", "valid", "expanded", "ms"
    );
    for r in rows {
        let status = serde_json::to_value(r.status).expect("status serializes");
        let _ = writeln!(
            s,
            "{:<12} {:<14} {:<17} {:>6} {:>6} {:>10} {:>10.1}",
            r.domain,
            r.problem,
            status.as_str().unwrap_or_default(),
            r.length.map_or("-".to_string(), |l| l.to_string()),
            r.valid.map_or("-", |v| if v { "yes" } else { "no" }),
            r.expanded,
            r.millis
        );
    }
    s
}
