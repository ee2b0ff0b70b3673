//! Structural and type checks over domains and problems.
//!
//! Violations are data: validation never fails, it reports.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::expr::{Arg, Effect, Expr, FluentApp, Term};
use super::ground::ground_atoms;
use super::model::{
    DomainModel, FluentDecl, FluentKind, GroundAtom, ObjectDecl, Param, ProblemInstance,
    UNIVERSAL_TYPE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationCode {
    UnknownType,
    DuplicateType,
    TypeCycle,
    DuplicateFluent,
    DuplicateParameter,
    DuplicateAction,
    DuplicateObject,
    UnknownFluent,
    UnknownObject,
    ArityMismatch,
    ArgumentTypeMismatch,
    KindMismatch,
    UnboundVariable,
    ContradictoryEffects,
    RequirementMismatch,
    UninitializedNumeric,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::UnknownType => "unknown-type",
            ViolationCode::DuplicateType => "duplicate-type",
            ViolationCode::TypeCycle => "type-cycle",
            ViolationCode::DuplicateFluent => "duplicate-fluent",
            ViolationCode::DuplicateParameter => "duplicate-parameter",
            ViolationCode::DuplicateAction => "duplicate-action",
            ViolationCode::DuplicateObject => "duplicate-object",
            ViolationCode::UnknownFluent => "unknown-fluent",
            ViolationCode::UnknownObject => "unknown-object",
            ViolationCode::ArityMismatch => "arity-mismatch",
            ViolationCode::ArgumentTypeMismatch => "argument-type-mismatch",
            ViolationCode::KindMismatch => "kind-mismatch",
            ViolationCode::UnboundVariable => "unbound-variable",
            ViolationCode::ContradictoryEffects => "contradictory-effects",
            ViolationCode::RequirementMismatch => "requirement-mismatch",
            ViolationCode::UninitializedNumeric => "uninitialized-numeric",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, message: String) {
        self.violations.push(Violation { code, message });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Variable or object typing context for expression checks.
pub(crate) struct Scope<'a> {
    pub vars: BTreeMap<&'a str, &'a str>,
    pub objects: BTreeMap<&'a str, &'a str>,
    pub context: String,
}

/// Checks that only concern the domain model.
pub fn validate_domain(domain: &DomainModel) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_types(domain, &mut report);
    check_fluents(domain, &mut report);

    let mut seen = HashSet::new();
    for action in &domain.actions {
        if !seen.insert(action.name.as_str()) {
            report.push(
                ViolationCode::DuplicateAction,
                format!("action `{}` declared more than once", action.name),
            );
        }
        check_params(
            domain,
            &action.parameters,
            &format!("action `{}`", action.name),
            &mut report,
        );
        let scope = Scope {
            vars: action
                .parameters
                .iter()
                .map(|p| (p.name.as_str(), p.ty.as_str()))
                .collect(),
            objects: BTreeMap::new(),
            context: format!("action `{}`", action.name),
        };
        check_expr(domain, &action.precondition, &scope, &mut report);
        check_effects(domain, &action.effects, &scope, &mut report);
    }

    let required = domain.required_flags();
    if required.numeric_fluents != domain.requirements.numeric_fluents {
        report.push(
            ViolationCode::RequirementMismatch,
            format!(
                "numeric-fluents flag is {} but the domain {} numeric fluents",
                domain.requirements.numeric_fluents,
                if required.numeric_fluents {
                    "declares"
                } else {
                    "has no"
                }
            ),
        );
    }
    if required.negative_preconditions && !domain.requirements.negative_preconditions {
        report.push(
            ViolationCode::RequirementMismatch,
            "a precondition uses `not` but negative-preconditions is not set".to_string(),
        );
    }
    if required.disjunctive_preconditions && !domain.requirements.disjunctive_preconditions {
        report.push(
            ViolationCode::RequirementMismatch,
            "a precondition uses `or` but disjunctive-preconditions is not set".to_string(),
        );
    }
    report
}

/// Full check of a problem instance: the domain, objects, initial
/// assignment and goal.
pub fn validate(problem: &ProblemInstance) -> ValidationReport {
    let domain = &problem.domain;
    let mut report = validate_domain(domain);

    let mut seen = HashSet::new();
    for obj in &problem.objects {
        if !seen.insert(obj.name.as_str()) {
            report.push(
                ViolationCode::DuplicateObject,
                format!("object `{}` declared more than once", obj.name),
            );
        }
        if !domain.has_type(&obj.ty) {
            report.push(
                ViolationCode::UnknownType,
                format!("object `{}` has undeclared type `{}`", obj.name, obj.ty),
            );
        }
    }

    let objects: BTreeMap<&str, &str> = problem
        .objects
        .iter()
        .map(|o| (o.name.as_str(), o.ty.as_str()))
        .collect();

    for atom in &problem.init.atoms {
        check_ground_atom(
            domain,
            &objects,
            atom,
            FluentKind::Boolean,
            "init",
            &mut report,
        );
    }
    for atom in problem.init.numeric.keys() {
        check_ground_atom(
            domain,
            &objects,
            atom,
            FluentKind::Numeric,
            "init",
            &mut report,
        );
    }

    let scope = Scope {
        vars: BTreeMap::new(),
        objects: objects.clone(),
        context: "goal".to_string(),
    };
    check_expr(domain, &problem.goal, &scope, &mut report);

    check_numeric_closure(problem, &mut report);
    report
}

fn check_types(domain: &DomainModel, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for t in &domain.types {
        if t.name == UNIVERSAL_TYPE || !seen.insert(t.name.as_str()) {
            report.push(
                ViolationCode::DuplicateType,
                format!("type `{}` declared more than once", t.name),
            );
        }
        if let Some(p) = &t.parent {
            if !domain.has_type(p) {
                report.push(
                    ViolationCode::UnknownType,
                    format!("type `{}` has undeclared parent `{p}`", t.name),
                );
            }
        }
    }
    for t in &domain.types {
        let mut cur = t.name.as_str();
        let mut steps = 0;
        while let Some(p) = domain.parent_of(cur) {
            if p == UNIVERSAL_TYPE || !domain.has_type(p) {
                break;
            }
            steps += 1;
            if p == t.name || steps > domain.types.len() {
                report.push(
                    ViolationCode::TypeCycle,
                    format!("type `{}` is its own ancestor", t.name),
                );
                break;
            }
            cur = p;
        }
    }
}

fn check_params(
    domain: &DomainModel,
    params: &[Param],
    context: &str,
    report: &mut ValidationReport,
) {
    let mut seen = HashSet::new();
    for p in params {
        if !seen.insert(p.name.as_str()) {
            report.push(
                ViolationCode::DuplicateParameter,
                format!("{context}: parameter `?{}` declared more than once", p.name),
            );
        }
        if !domain.has_type(&p.ty) {
            report.push(
                ViolationCode::UnknownType,
                format!(
                    "{context}: parameter `?{}` has undeclared type `{}`",
                    p.name, p.ty
                ),
            );
        }
    }
}

fn check_fluents(domain: &DomainModel, report: &mut ValidationReport) {
    let mut seen = HashSet::new();
    for f in &domain.fluents {
        if !seen.insert(f.name.as_str()) {
            report.push(
                ViolationCode::DuplicateFluent,
                format!("fluent `{}` declared more than once", f.name),
            );
        }
        check_params(
            domain,
            &f.parameters,
            &format!("fluent `{}`", f.name),
            report,
        );
    }
}

/// Check a fluent application against its declaration; `expected` is the
/// kind the position requires.
pub(crate) fn check_app(
    domain: &DomainModel,
    app: &FluentApp,
    expected: FluentKind,
    scope: &Scope<'_>,
    report: &mut ValidationReport,
) {
    let ctx = &scope.context;
    let Some(decl) = domain.fluent(&app.fluent) else {
        report.push(
            ViolationCode::UnknownFluent,
            format!("{ctx}: `{app}` uses undeclared fluent `{}`", app.fluent),
        );
        return;
    };
    if decl.kind != expected {
        report.push(
            ViolationCode::KindMismatch,
            format!(
                "{ctx}: `{app}` is {} but used in a {} position",
                kind_name(decl.kind),
                kind_name(expected)
            ),
        );
    }
    if decl.parameters.len() != app.args.len() {
        report.push(
            ViolationCode::ArityMismatch,
            format!(
                "{ctx}: `{app}` has {} arguments, `{}` expects {}",
                app.args.len(),
                decl.name,
                decl.parameters.len()
            ),
        );
        return;
    }
    for (arg, param) in app.args.iter().zip(&decl.parameters) {
        let actual = match arg {
            Arg::Var(v) => match scope.vars.get(v.as_str()) {
                Some(t) => *t,
                None => {
                    report.push(
                        ViolationCode::UnboundVariable,
                        format!("{ctx}: variable `?{v}` in `{app}` is not a parameter"),
                    );
                    continue;
                }
            },
            Arg::Obj(o) => match scope.objects.get(o.as_str()) {
                Some(t) => *t,
                None => {
                    report.push(
                        ViolationCode::UnknownObject,
                        format!("{ctx}: `{app}` refers to undeclared object `{o}`"),
                    );
                    continue;
                }
            },
        };
        if domain.has_type(actual) && !domain.is_subtype(actual, &param.ty) {
            report.push(
                ViolationCode::ArgumentTypeMismatch,
                format!(
                    "{ctx}: argument `{arg}` of `{app}` has type `{actual}`, expected `{}`",
                    param.ty
                ),
            );
        }
    }
}

fn kind_name(k: FluentKind) -> &'static str {
    match k {
        FluentKind::Boolean => "boolean",
        FluentKind::Numeric => "numeric",
    }
}

pub(crate) fn check_expr(
    domain: &DomainModel,
    expr: &Expr,
    scope: &Scope<'_>,
    report: &mut ValidationReport,
) {
    match expr {
        Expr::And(items) | Expr::Or(items) => {
            for e in items {
                check_expr(domain, e, scope, report);
            }
        }
        Expr::Not(e) => check_expr(domain, e, scope, report),
        Expr::Atom(app) => check_app(domain, app, FluentKind::Boolean, scope, report),
        Expr::Compare(_, l, r) => {
            check_term(domain, l, scope, report);
            check_term(domain, r, scope, report);
        }
    }
}

fn check_term(domain: &DomainModel, term: &Term, scope: &Scope<'_>, report: &mut ValidationReport) {
    match term {
        Term::Const(_) => {}
        Term::Fluent(app) => check_app(domain, app, FluentKind::Numeric, scope, report),
        Term::Add(a, b) | Term::Sub(a, b) => {
            check_term(domain, a, scope, report);
            check_term(domain, b, scope, report);
        }
    }
}

pub(crate) fn check_effects(
    domain: &DomainModel,
    effects: &[Effect],
    scope: &Scope<'_>,
    report: &mut ValidationReport,
) {
    let mut set_true = BTreeSet::new();
    let mut set_false = BTreeSet::new();
    for eff in effects {
        match eff {
            Effect::Set { atom, value } => {
                check_app(domain, atom, FluentKind::Boolean, scope, report);
                if *value {
                    set_true.insert(atom);
                } else {
                    set_false.insert(atom);
                }
            }
            Effect::Numeric { target, value, .. } => {
                check_app(domain, target, FluentKind::Numeric, scope, report);
                check_term(domain, value, scope, report);
            }
        }
    }
    for atom in set_true.intersection(&set_false) {
        report.push(
            ViolationCode::ContradictoryEffects,
            format!("{}: `{atom}` is both added and deleted", scope.context),
        );
    }
}

fn check_ground_atom(
    domain: &DomainModel,
    objects: &BTreeMap<&str, &str>,
    atom: &GroundAtom,
    kind: FluentKind,
    context: &str,
    report: &mut ValidationReport,
) {
    let app = FluentApp::ground(&atom.fluent, &atom.args);
    let scope = Scope {
        vars: BTreeMap::new(),
        objects: objects.clone(),
        context: context.to_string(),
    };
    check_app(domain, &app, kind, &scope, report);
}

/// Every numeric atom an action or the goal can read must be initialized.
fn check_numeric_closure(problem: &ProblemInstance, report: &mut ValidationReport) {
    let domain = &problem.domain;
    let mut needed: BTreeSet<GroundAtom> = BTreeSet::new();

    let mut lifted_numeric: BTreeSet<&str> = BTreeSet::new();
    for action in &domain.actions {
        action.precondition.visit_apps(&mut |app, numeric| {
            if numeric {
                lifted_numeric.insert(app.fluent.as_str());
            }
        });
        for eff in &action.effects {
            if let Effect::Numeric { target, value, .. } = eff {
                lifted_numeric.insert(target.fluent.as_str());
                let mut apps = Vec::new();
                value.fluents(&mut apps);
                for a in apps {
                    if let Some(f) = domain.fluent(&a.fluent) {
                        lifted_numeric.insert(f.name.as_str());
                    }
                }
            }
        }
    }
    let declared_numeric: Vec<&FluentDecl> = domain
        .fluents
        .iter()
        .filter(|f| f.kind == FluentKind::Numeric && lifted_numeric.contains(f.name.as_str()))
        .collect();
    if !declared_numeric.is_empty() {
        let grounded = ground_atoms(domain, &problem.objects);
        for atom in grounded.numeric {
            if lifted_numeric.contains(atom.fluent.as_str()) {
                needed.insert(atom);
            }
        }
    }

    problem.goal.visit_apps(&mut |app, numeric| {
        if numeric && app.vars().next().is_none() {
            if let Some(f) = domain.fluent(&app.fluent) {
                if f.kind == FluentKind::Numeric {
                    needed.insert(GroundAtom {
                        fluent: app.fluent.clone(),
                        args: app.args.iter().map(|a| a.name().to_string()).collect(),
                    });
                }
            }
        }
    });

    for atom in needed {
        if !problem.init.numeric.contains_key(&atom) {
            report.push(
                ViolationCode::UninitializedNumeric,
                format!("numeric atom `{atom}` is read but has no initial value"),
            );
        }
    }
}

/// Check one object list against a domain (duplicates and types).
pub(crate) fn object_problems(domain: &DomainModel, objects: &[ObjectDecl]) -> Vec<Violation> {
    let mut report = ValidationReport::default();
    let mut seen = HashSet::new();
    for obj in objects {
        if !seen.insert(obj.name.as_str()) {
            report.push(
                ViolationCode::DuplicateObject,
                format!("object `{}` declared more than once", obj.name),
            );
        }
        if !domain.has_type(&obj.ty) {
            report.push(
                ViolationCode::UnknownType,
                format!("object `{}` has undeclared type `{}`", obj.name, obj.ty),
            );
        }
    }
    report.violations
}
