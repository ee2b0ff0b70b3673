//! Tool-requested modifications of a domain model or object set.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::model::{DomainEdit, DomainModel, EditKind, ObjectDecl};
use super::validate::{self, Scope, ValidationReport, ViolationCode};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome", content = "reason")]
pub enum EditOutcome {
    Applied,
    Rejected(String),
}

impl EditOutcome {
    pub fn is_applied(&self) -> bool {
        matches!(self, EditOutcome::Applied)
    }
}

/// Result of [`apply_edit`]. On rejection `domain` and `objects` equal the
/// inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditResult {
    pub domain: DomainModel,
    pub objects: Vec<ObjectDecl>,
    pub outcome: EditOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EditError {
    #[error("edit has no provenance")]
    MissingProvenance,
    #[error("modify_action for `{0}` replaces neither precondition nor effects")]
    EmptyModification(String),
    #[error("malformed edit: {0}")]
    Malformed(String),
}

/// Apply one edit atomically. Errors and rejections leave the inputs
/// untouched; the caller keeps its originals.
pub fn apply_edit(
    domain: &DomainModel,
    objects: &[ObjectDecl],
    edit: &DomainEdit,
) -> Result<EditResult, EditError> {
    if edit.provenance.trim().is_empty() {
        return Err(EditError::MissingProvenance);
    }
    let rejected = |reason: String| EditResult {
        domain: domain.clone(),
        objects: objects.to_vec(),
        outcome: EditOutcome::Rejected(reason),
    };

    match &edit.kind {
        EditKind::AddOrModifyFluent(fluent) => {
            let mut names = BTreeSet::new();
            for p in &fluent.parameters {
                if !names.insert(p.name.as_str()) {
                    return Err(EditError::Malformed(format!(
                        "fluent `{}` repeats parameter `?{}`",
                        fluent.name, p.name
                    )));
                }
            }
            if fluent.name.trim().is_empty() {
                return Err(EditError::Malformed("fluent name is empty".to_string()));
            }
            if let Some(existing) = domain.fluent(&fluent.name) {
                return Ok(rejected(if existing.same_signature(fluent) {
                    format!(
                        "duplicate: fluent `{}` already exists with this signature",
                        fluent.name
                    )
                } else {
                    format!(
                        "type conflict: fluent `{}` already exists with a different signature",
                        fluent.name
                    )
                }));
            }
            if let Some(p) = fluent.parameters.iter().find(|p| !domain.has_type(&p.ty)) {
                return Ok(rejected(format!(
                    "type conflict: parameter `?{}` of `{}` has undeclared type `{}`",
                    p.name, fluent.name, p.ty
                )));
            }
            let mut next = domain.clone();
            next.fluents.push(fluent.clone());
            Ok(EditResult {
                domain: next.normalized(),
                objects: objects.to_vec(),
                outcome: EditOutcome::Applied,
            })
        }
        EditKind::ModifyAction {
            action,
            precondition,
            effects,
        } => {
            if precondition.is_none() && effects.is_none() {
                return Err(EditError::EmptyModification(action.clone()));
            }
            let Some(index) = domain.actions.iter().position(|a| &a.name == action) else {
                return Ok(rejected(format!("unknown action `{action}`")));
            };
            let schema = &domain.actions[index];
            let params: BTreeSet<&str> =
                schema.parameters.iter().map(|p| p.name.as_str()).collect();

            let mut unbound = BTreeSet::new();
            if let Some(pre) = precondition {
                unbound.extend(
                    pre.vars()
                        .into_iter()
                        .filter(|v| !params.contains(v.as_str())),
                );
            }
            if let Some(effs) = effects {
                for e in effs {
                    unbound.extend(
                        e.vars()
                            .into_iter()
                            .filter(|v| !params.contains(v.as_str())),
                    );
                }
            }
            if !unbound.is_empty() {
                let list: Vec<String> = unbound.iter().map(|v| format!("?{v}")).collect();
                return Err(EditError::Malformed(format!(
                    "unbound variables in replacement for `{action}`: {}",
                    list.join(", ")
                )));
            }

            let mut updated = schema.clone();
            if let Some(pre) = precondition {
                updated.precondition = pre.clone();
            }
            if let Some(effs) = effects {
                updated.effects = effs.clone();
            }

            let scope = Scope {
                vars: updated
                    .parameters
                    .iter()
                    .map(|p| (p.name.as_str(), p.ty.as_str()))
                    .collect(),
                objects: BTreeMap::new(),
                context: format!("action `{action}`"),
            };
            let mut report = ValidationReport::default();
            validate::check_expr(domain, &updated.precondition, &scope, &mut report);
            validate::check_effects(domain, &updated.effects, &scope, &mut report);
            if report.has(ViolationCode::ContradictoryEffects) {
                return Err(EditError::Malformed(report.to_string()));
            }
            if !report.is_valid() {
                return Ok(rejected(format!("type conflict: {report}")));
            }
            if updated == *schema {
                return Ok(rejected(format!(
                    "duplicate: action `{action}` already has this definition"
                )));
            }

            let mut next = domain.clone();
            next.actions[index] = updated;
            Ok(EditResult {
                domain: next.normalized(),
                objects: objects.to_vec(),
                outcome: EditOutcome::Applied,
            })
        }
        EditKind::AddObjects(new_objects) => {
            if new_objects.is_empty() {
                return Err(EditError::Malformed(
                    "add_objects lists no objects".to_string(),
                ));
            }
            let mut all = objects.to_vec();
            all.extend(new_objects.iter().cloned());
            let problems = validate::object_problems(domain, &all);
            if let Some(v) = problems.first() {
                let kind = match v.code {
                    ViolationCode::DuplicateObject => "duplicate",
                    _ => "type conflict",
                };
                return Ok(rejected(format!("{kind}: {}", v.message)));
            }
            Ok(EditResult {
                domain: domain.clone(),
                objects: all,
                outcome: EditOutcome::Applied,
            })
        }
    }
}
