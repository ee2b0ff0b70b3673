//! IR to canonical PDDL text.
//!
//! The layout is fixed so that emitting, parsing and emitting again yields
//! the same bytes.

use std::fmt::Write;

use crate::ir::{DomainModel, Expr, ObjectDecl, Param, ProblemInstance, UNIVERSAL_TYPE};

/// `?a ?b - block ?c`: consecutive parameters of one type share an
/// annotation; a trailing group of the universal type carries none.
fn typed_names<'a>(items: impl Iterator<Item = (String, &'a str)>) -> String {
    let items: Vec<(String, &str)> = items.collect();
    let mut groups: Vec<(Vec<String>, &str)> = Vec::new();
    for (name, ty) in items {
        match groups.last_mut() {
            Some((names, last_ty)) if *last_ty == ty => names.push(name),
            _ => groups.push((vec![name], ty)),
        }
    }
    let n = groups.len();
    groups
        .into_iter()
        .enumerate()
        .map(|(i, (names, ty))| {
            if i + 1 == n && ty == UNIVERSAL_TYPE {
                names.join(" ")
            } else {
                format!("{} - {ty}", names.join(" "))
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn params(ps: &[Param]) -> String {
    typed_names(ps.iter().map(|p| (format!("?{}", p.name), p.ty.as_str())))
}

fn objects(os: &[ObjectDecl]) -> String {
    typed_names(os.iter().map(|o| (o.name.clone(), o.ty.as_str())))
}

fn signature(name: &str, ps: &[Param]) -> String {
    if ps.is_empty() {
        format!("({name})")
    } else {
        format!("({name} {})", params(ps))
    }
}

pub fn emit_domain(domain: &DomainModel) -> String {
    let req = domain.required_flags();
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", domain.name);

    let mut flags = vec![":strips"];
    if req.typing {
        flags.push(":typing");
    }
    if req.negative_preconditions {
        flags.push(":negative-preconditions");
    }
    if req.disjunctive_preconditions {
        flags.push(":disjunctive-preconditions");
    }
    if req.numeric_fluents {
        flags.push(":numeric-fluents");
    }
    let _ = writeln!(out, "  (:requirements {})", flags.join(" "));

    if !domain.types.is_empty() {
        out.push_str("  (:types\n");
        let mut groups: Vec<(Vec<&str>, &str)> = Vec::new();
        for t in &domain.types {
            let parent = t.parent.as_deref().unwrap_or(UNIVERSAL_TYPE);
            match groups.last_mut() {
                Some((names, p)) if *p == parent => names.push(&t.name),
                _ => groups.push((vec![&t.name], parent)),
            }
        }
        for (names, parent) in groups {
            let _ = writeln!(out, "    {} - {parent}", names.join(" "));
        }
        out.push_str("  )\n");
    }

    let preds: Vec<_> = domain
        .fluents
        .iter()
        .filter(|f| f.kind == crate::ir::FluentKind::Boolean)
        .collect();
    let funcs: Vec<_> = domain
        .fluents
        .iter()
        .filter(|f| f.kind == crate::ir::FluentKind::Numeric)
        .collect();
    if !preds.is_empty() {
        out.push_str("  (:predicates\n");
        for p in preds {
            let _ = writeln!(out, "    {}", signature(&p.name, &p.parameters));
        }
        out.push_str("  )\n");
    }
    if !funcs.is_empty() {
        let sigs: Vec<String> = funcs
            .iter()
            .map(|f| signature(&f.name, &f.parameters))
            .collect();
        let _ = writeln!(out, "  (:functions {})", sigs.join(" "));
    }

    for a in &domain.actions {
        let _ = writeln!(out, "  (:action {}", a.name);
        let _ = writeln!(out, "    :parameters ({})", params(&a.parameters));
        if a.precondition != Expr::truth() {
            let _ = writeln!(out, "    :precondition {}", a.precondition);
        }
        let effs: Vec<String> = a.effects.iter().map(ToString::to_string).collect();
        if effs.is_empty() {
            out.push_str("    :effect (and)\n");
        } else {
            let _ = writeln!(out, "    :effect (and {})", effs.join(" "));
        }
        out.push_str("  )\n");
    }
    out.push_str(")\n");
    out
}

pub fn emit_problem(problem: &ProblemInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", problem.name);
    let _ = writeln!(out, "  (:domain {})", problem.domain.name);
    if !problem.objects.is_empty() {
        let _ = writeln!(out, "  (:objects {})", objects(&problem.objects));
    }
    out.push_str("  (:init\n");
    for atom in &problem.init.atoms {
        let _ = writeln!(out, "    {atom}");
    }
    for (atom, value) in &problem.init.numeric {
        let v = crate::ir::Term::Const(*value);
        let _ = writeln!(out, "    (= {atom} {v})");
    }
    out.push_str("  )\n");
    let _ = writeln!(out, "  (:goal {})", problem.goal);
    out.push_str(")\n");
    out
}
