use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::expr::{Effect, Expr};
use crate::number::Number;

/// Root of every type hierarchy. Never declared explicitly.
pub const UNIVERSAL_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeDecl {
    pub name: String,
    /// `None` means a direct child of [`UNIVERSAL_TYPE`].
    #[serde(default)]
    pub parent: Option<String>,
}

impl TypeDecl {
    pub fn new(name: &str, parent: Option<&str>) -> Self {
        TypeDecl {
            name: name.to_string(),
            parent: parent.filter(|p| *p != UNIVERSAL_TYPE).map(str::to_string),
        }
    }
}

/// A typed parameter. Names are stored without the leading `?`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl Param {
    pub fn new(name: &str, ty: &str) -> Self {
        Param {
            name: name.to_string(),
            ty: ty.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluentKind {
    Boolean,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FluentDecl {
    pub name: String,
    #[serde(default)]
    pub parameters: Vec<Param>,
    pub kind: FluentKind,
    /// Documentation only. Not carried by the PDDL encoding.
    #[serde(default)]
    pub description: String,
}

impl FluentDecl {
    pub fn boolean(name: &str, parameters: Vec<Param>) -> Self {
        FluentDecl {
            name: name.to_string(),
            parameters,
            kind: FluentKind::Boolean,
            description: String::new(),
        }
    }

    pub fn numeric(name: &str, parameters: Vec<Param>) -> Self {
        FluentDecl {
            kind: FluentKind::Numeric,
            ..FluentDecl::boolean(name, parameters)
        }
    }

    pub fn with_description(mut self, d: &str) -> Self {
        self.description = d.to_string();
        self
    }

    /// Same name, parameter types and kind. Parameter names and the
    /// description are not part of the signature.
    pub fn same_signature(&self, other: &FluentDecl) -> bool {
        self.name == other.name
            && self.kind == other.kind
            && self.parameters.len() == other.parameters.len()
            && self
                .parameters
                .iter()
                .zip(&other.parameters)
                .all(|(a, b)| a.ty == b.ty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionSchema {
    pub name: String,
    #[serde(default)]
    pub parameters: Vec<Param>,
    #[serde(default = "Expr::truth")]
    pub precondition: Expr,
    #[serde(default)]
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct Requirements {
    pub typing: bool,
    pub negative_preconditions: bool,
    pub disjunctive_preconditions: bool,
    pub numeric_fluents: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DomainModel {
    pub name: String,
    #[serde(default)]
    pub requirements: Requirements,
    #[serde(default)]
    pub types: Vec<TypeDecl>,
    #[serde(default)]
    pub fluents: Vec<FluentDecl>,
    #[serde(default)]
    pub actions: Vec<ActionSchema>,
}

impl DomainModel {
    pub fn new(name: &str) -> Self {
        DomainModel {
            name: name.to_string(),
            requirements: Requirements::default(),
            types: Vec::new(),
            fluents: Vec::new(),
            actions: Vec::new(),
        }
    }

    pub fn fluent(&self, name: &str) -> Option<&FluentDecl> {
        self.fluents.iter().find(|f| f.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn has_type(&self, name: &str) -> bool {
        name == UNIVERSAL_TYPE || self.types.iter().any(|t| t.name == name)
    }

    /// Parent of a declared type; the universal type for roots.
    pub fn parent_of(&self, name: &str) -> Option<&str> {
        if name == UNIVERSAL_TYPE {
            return None;
        }
        self.types
            .iter()
            .find(|t| t.name == name)
            .map(|t| t.parent.as_deref().unwrap_or(UNIVERSAL_TYPE))
    }

    /// Reflexive subtype test. Cycles terminate and report `false`.
    pub fn is_subtype(&self, ty: &str, ancestor: &str) -> bool {
        if ancestor == UNIVERSAL_TYPE {
            return true;
        }
        let mut cur = ty;
        for _ in 0..=self.types.len() {
            if cur == ancestor {
                return true;
            }
            match self.parent_of(cur) {
                Some(p) => cur = p,
                None => return false,
            }
        }
        false
    }

    /// The requirement flags this model actually uses.
    pub fn required_flags(&self) -> Requirements {
        Requirements {
            typing: !self.types.is_empty(),
            negative_preconditions: self.actions.iter().any(|a| a.precondition.has_negation()),
            disjunctive_preconditions: self
                .actions
                .iter()
                .any(|a| a.precondition.has_disjunction()),
            numeric_fluents: self.fluents.iter().any(|f| f.kind == FluentKind::Numeric),
        }
    }

    /// Copy with requirement flags recomputed from usage.
    pub fn normalized(mut self) -> Self {
        self.requirements = self.required_flags();
        self
    }

    /// Copy with fluent descriptions cleared; the PDDL round trip preserves
    /// everything else.
    pub fn without_descriptions(&self) -> Self {
        let mut d = self.clone();
        for f in &mut d.fluents {
            f.description.clear();
        }
        d
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObjectDecl {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: String,
}

impl ObjectDecl {
    pub fn new(name: &str, ty: &str) -> Self {
        ObjectDecl {
            name: name.to_string(),
            ty: ty.to_string(),
        }
    }
}

/// A fluent applied to object names, e.g. `(on b1 b2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub fluent: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<S: AsRef<str>>(fluent: &str, args: &[S]) -> Self {
        GroundAtom {
            fluent: fluent.to_string(),
            args: args.iter().map(|a| a.as_ref().to_string()).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.fluent)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

impl std::str::FromStr for GroundAtom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let inner = s
            .trim()
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| format!("ground atom `{s}` must be parenthesized"))?;
        let mut parts = inner.split_whitespace().map(str::to_lowercase);
        let fluent = parts
            .next()
            .ok_or_else(|| format!("ground atom `{s}` has no fluent name"))?;
        let args: Vec<String> = parts.collect();
        if fluent.contains(['(', ')']) || args.iter().any(|a| a.contains(['(', ')', '?'])) {
            return Err(format!(
                "ground atom `{s}` must be flat with object arguments"
            ));
        }
        Ok(GroundAtom { fluent, args })
    }
}

impl Serialize for GroundAtom {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroundAtom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Initial fluent values. Closed world: boolean atoms not listed are false.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment {
    #[serde(default)]
    pub atoms: BTreeSet<GroundAtom>,
    #[serde(default)]
    pub numeric: BTreeMap<GroundAtom, Number>,
}

impl Assignment {
    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn value(&self, atom: &GroundAtom) -> Option<Number> {
        self.numeric.get(atom).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    pub domain: DomainModel,
    #[serde(default)]
    pub objects: Vec<ObjectDecl>,
    #[serde(default)]
    pub init: Assignment,
    #[serde(default = "Expr::truth")]
    pub goal: Expr,
}

impl ProblemInstance {
    pub fn object_type(&self, name: &str) -> Option<&str> {
        self.objects
            .iter()
            .find(|o| o.name == name)
            .map(|o| o.ty.as_str())
    }
}

/// What a [`DomainEdit`] asks for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EditKind {
    AddOrModifyFluent(FluentDecl),
    ModifyAction {
        action: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precondition: Option<Expr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        effects: Option<Vec<Effect>>,
    },
    AddObjects(Vec<ObjectDecl>),
}

/// A modification requested through an agent tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainEdit {
    #[serde(flatten)]
    pub kind: EditKind,
    /// Which agent or tool asked for the edit.
    pub provenance: String,
}

impl DomainEdit {
    pub fn new(kind: EditKind, provenance: &str) -> Self {
        DomainEdit {
            kind,
            provenance: provenance.to_string(),
        }
    }
}
