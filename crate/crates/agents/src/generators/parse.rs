//! Turning agent replies into planning artifacts, with error text written
//! for the agent that has to fix its output.

use std::fmt::Write;

use adaplan_core::ir::{
    self, Assignment, CmpOp, DomainModel, EditKind, Expr, GroundAtom, ObjectDecl, ProblemInstance,
    Term,
};
use adaplan_core::pddl;
use adaplan_core::planner;
use serde::Deserialize;
use serde_json::Value;

/// A reply that could not be used: feedback for the agent plus whatever
/// partial artifact was recoverable.
#[derive(Debug, Clone, PartialEq)]
pub struct Unusable<C> {
    pub feedback: String,
    pub candidate: Option<C>,
}

impl<C> Unusable<C> {
    fn bare(feedback: impl Into<String>) -> Self {
        Unusable {
            feedback: feedback.into(),
            candidate: None,
        }
    }
}

/// Body of the first fenced code block, or the whole text trimmed.
pub fn strip_fences(text: &str) -> &str {
    let t = text.trim();
    let Some(start) = t.find("```") else {
        return t;
    };
    let after = &t[start + 3..];
    let body_start = after.find('\n').map_or(after.len(), |i| i + 1);
    let body = &after[body_start..];
    match body.find("```") {
        Some(end) => body[..end].trim(),
        None => body.trim(),
    }
}

fn report_problem(report: &ir::ValidationReport) -> String {
    let mut s = String::new();
    for v in &report.violations {
        let _ = writeln!(s, "- {v}");
    }
    s
}

/// A full domain, as PDDL or as the JSON form of [`DomainModel`].
pub fn domain_output(text: &str) -> Result<DomainModel, Unusable<DomainModel>> {
    let body = strip_fences(text);
    if body.is_empty() {
        return Err(Unusable::bare(
            "the reply is empty; send the complete PDDL domain",
        ));
    }
    let domain = if body.starts_with('{') {
        serde_json::from_str::<DomainModel>(body)
            .map_err(|e| Unusable::bare(format!("the domain JSON does not parse: {e}")))?
    } else {
        pddl::parse_domain(body).map_err(|e| {
            Unusable::bare(format!(
                "the domain does not parse: {}",
                e.render("domain.pddl")
            ))
        })?
    };
    let report = ir::validate_domain(&domain);
    if !report.is_valid() {
        return Err(Unusable {
            feedback: format!("the domain is invalid:\n{}", report_problem(&report)),
            candidate: Some(domain),
        });
    }
    Ok(domain)
}

#[derive(Deserialize)]
struct InitReply {
    #[serde(default)]
    objects: Vec<ObjectDecl>,
    #[serde(default)]
    init: Vec<String>,
}

fn init_fact(text: &str, into: &mut Assignment) -> Result<(), String> {
    let expr = pddl::parse_expr(text).map_err(|e| format!("`{text}`: {}", e.message))?;
    let ground = |app: &ir::FluentApp| -> Result<GroundAtom, String> {
        let mut args = Vec::new();
        for a in &app.args {
            match a {
                ir::Arg::Obj(o) => args.push(o.clone()),
                ir::Arg::Var(v) => {
                    return Err(format!(
                        "`{text}` uses variable ?{v}; initial facts must be ground"
                    ))
                }
            }
        }
        Ok(GroundAtom::new(&app.fluent, &args))
    };
    match &expr {
        Expr::Atom(app) => {
            into.atoms.insert(ground(app)?);
        }
        Expr::Compare(CmpOp::Eq, Term::Fluent(app), Term::Const(n)) => {
            into.numeric.insert(ground(app)?, *n);
        }
        _ => {
            return Err(format!(
                "`{text}` is not an initial fact; use `(fluent obj ...)` or `(= (function obj ...) value)`"
            ))
        }
    }
    Ok(())
}

/// Objects and initial values as JSON, checked against `domain`.
pub fn init_output(
    text: &str,
    name: &str,
    domain: &DomainModel,
) -> Result<(Vec<ObjectDecl>, Assignment), Unusable<ProblemInstance>> {
    let body = strip_fences(text);
    let reply: InitReply = serde_json::from_str(body).map_err(|e| {
        Unusable::bare(format!(
            "the reply is not the expected JSON {{\"objects\": [...], \"init\": [...]}}: {e}"
        ))
    })?;
    let mut init = Assignment::default();
    let mut errors = Vec::new();
    for fact in &reply.init {
        if let Err(e) = init_fact(fact, &mut init) {
            errors.push(e);
        }
    }
    if !errors.is_empty() {
        return Err(Unusable::bare(format!(
            "some initial facts are unusable:\n- {}",
            errors.join("\n- ")
        )));
    }
    let problem = ProblemInstance {
        name: name.to_string(),
        domain: domain.clone(),
        objects: reply.objects,
        init,
        goal: Expr::truth(),
    };
    check_problem(problem).map(|p| (p.objects, p.init))
}

fn check_problem(problem: ProblemInstance) -> Result<ProblemInstance, Unusable<ProblemInstance>> {
    let report = ir::validate(&problem);
    if !report.is_valid() {
        return Err(Unusable {
            feedback: format!("the problem is invalid:\n{}", report_problem(&report)),
            candidate: Some(problem),
        });
    }
    if let Err(e) = planner::ground(&problem) {
        return Err(Unusable {
            feedback: format!("the problem cannot be grounded: {e}"),
            candidate: Some(problem),
        });
    }
    Ok(problem)
}

/// A goal as `{"goal": "..."}` or a bare PDDL condition, checked against
/// the partial problem.
pub fn goal_output(
    text: &str,
    partial: &ProblemInstance,
) -> Result<Expr, Unusable<ProblemInstance>> {
    let body = strip_fences(text);
    let goal_text = if body.starts_with('{') {
        let v: Value = serde_json::from_str(body)
            .map_err(|e| Unusable::bare(format!("the reply is not valid JSON: {e}")))?;
        match v.get("goal").and_then(Value::as_str) {
            Some(g) => g.to_string(),
            None => {
                return Err(Unusable::bare(
                    "the JSON reply has no string field \"goal\"",
                ))
            }
        }
    } else {
        body.to_string()
    };
    let goal = pddl::parse_expr(&goal_text)
        .map_err(|e| Unusable::bare(format!("the goal does not parse: {}", e.render("goal"))))?;
    let problem = ProblemInstance {
        goal,
        ..partial.clone()
    };
    check_problem(problem).map(|p| p.goal)
}

/// What the domain agent decided about an upstream request.
#[derive(Debug, Clone, PartialEq)]
pub enum EditDecision {
    Apply(Vec<EditKind>),
    Reject(String),
}

/// `{"reject": reason}`, `{"edits": [...]}`, a bare list of edits or a
/// single edit object.
pub fn edit_output(text: &str) -> Result<EditDecision, Unusable<()>> {
    let body = strip_fences(text);
    let v: Value = serde_json::from_str(body).map_err(|e| {
        Unusable::bare(format!(
            "the reply is not valid JSON: {e}. Reply with {{\"edits\": [...]}} or {{\"reject\": \"reason\"}}"
        ))
    })?;
    if let Some(reason) = v.get("reject") {
        let reason = reason
            .as_str()
            .map_or_else(|| reason.to_string(), str::to_string);
        return Ok(EditDecision::Reject(reason));
    }
    let items = match v {
        Value::Object(ref map) if map.contains_key("edits") => map["edits"].clone(),
        Value::Array(_) => v,
        other => Value::Array(vec![other]),
    };
    let Value::Array(items) = items else {
        return Err(Unusable::bare("\"edits\" must be a list"));
    };
    if items.is_empty() {
        return Err(Unusable::bare(
            "the edit list is empty; send edits or a rejection",
        ));
    }
    let mut edits = Vec::new();
    for (i, item) in items.into_iter().enumerate() {
        let kind: EditKind = serde_json::from_value(item)
            .map_err(|e| Unusable::bare(format!("edit {} is malformed: {e}", i + 1)))?;
        if matches!(kind, EditKind::AddObjects(_)) {
            return Err(Unusable::bare(
                "objects are owned by the initial state, not the domain",
            ));
        }
        edits.push(kind);
    }
    Ok(EditDecision::Apply(edits))
}

/// Objects and initial facts as prompt text.
pub fn render_state(objects: &[ObjectDecl], init: &Assignment) -> String {
    let mut s = String::from("Objects:\n");
    for o in objects {
        let _ = writeln!(s, "  {} - {}", o.name, o.ty);
    }
    s.push_str("Initial state:\n");
    for a in &init.atoms {
        let _ = writeln!(s, "  {a}");
    }
    for (a, v) in &init.numeric {
        let _ = writeln!(s, "  (= {a} {})", Term::Const(*v));
    }
    s
}
