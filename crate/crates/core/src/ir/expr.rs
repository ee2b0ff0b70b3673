//! Conditions, numeric terms and effects.
//!
//! Expressions serialize to their PDDL surface syntax so the JSON form of a
//! domain stays readable, e.g. `"(and (holding ?b1) (< (size ?b1) (size ?b2)))"`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::number::Number;

/// An argument of a fluent application: a schema variable or an object.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Obj(String),
}

impl Arg {
    pub fn name(&self) -> &str {
        match self {
            Arg::Var(n) | Arg::Obj(n) => n,
        }
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Var(v) => write!(f, "?{v}"),
            Arg::Obj(o) => f.write_str(o),
        }
    }
}

/// `(fluent arg ...)`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentApp {
    pub fluent: String,
    pub args: Vec<Arg>,
}

impl FluentApp {
    pub fn new(fluent: impl Into<String>, args: Vec<Arg>) -> Self {
        FluentApp {
            fluent: fluent.into(),
            args,
        }
    }

    /// Application with object arguments only.
    pub fn ground<S: AsRef<str>>(fluent: &str, args: &[S]) -> Self {
        FluentApp {
            fluent: fluent.to_string(),
            args: args
                .iter()
                .map(|a| Arg::Obj(a.as_ref().to_string()))
                .collect(),
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|a| match a {
            Arg::Var(v) => Some(v.as_str()),
            Arg::Obj(_) => None,
        })
    }
}

impl fmt::Display for FluentApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.fluent)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CmpOp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Eq => "=",
            CmpOp::Ge => ">=",
            CmpOp::Gt => ">",
        }
    }

    pub fn from_symbol(s: &str) -> Option<CmpOp> {
        Some(match s {
            "<" => CmpOp::Lt,
            "<=" => CmpOp::Le,
            "=" => CmpOp::Eq,
            ">=" => CmpOp::Ge,
            ">" => CmpOp::Gt,
            _ => return None,
        })
    }

    /// The operator of `not (a op b)`, if it is itself a comparison.
    pub fn negated(self) -> Option<CmpOp> {
        match self {
            CmpOp::Lt => Some(CmpOp::Ge),
            CmpOp::Le => Some(CmpOp::Gt),
            CmpOp::Ge => Some(CmpOp::Lt),
            CmpOp::Gt => Some(CmpOp::Le),
            CmpOp::Eq => None,
        }
    }

    pub fn holds<T: PartialOrd>(self, lhs: &T, rhs: &T) -> bool {
        match self {
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// Numeric term: constants, numeric fluent applications, `+` and `-`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Number),
    Fluent(FluentApp),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
}

impl Term {
    pub fn fluents(&self, out: &mut Vec<FluentApp>) {
        match self {
            Term::Const(_) => {}
            Term::Fluent(app) => out.push(app.clone()),
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.fluents(out);
                b.fluents(out);
            }
        }
    }

    pub fn map_args(&self, f: &impl Fn(&Arg) -> Arg) -> Term {
        match self {
            Term::Const(c) => Term::Const(*c),
            Term::Fluent(app) => Term::Fluent(map_app(app, f)),
            Term::Add(a, b) => Term::Add(Box::new(a.map_args(f)), Box::new(b.map_args(f))),
            Term::Sub(a, b) => Term::Sub(Box::new(a.map_args(f)), Box::new(b.map_args(f))),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => match c.to_decimal() {
                Some(d) => f.write_str(&d),
                None => write!(f, "(/ {} {})", c.numer(), c.denom()),
            },
            Term::Fluent(app) => write!(f, "{app}"),
            Term::Add(a, b) => write!(f, "(+ {a} {b})"),
            Term::Sub(a, b) => write!(f, "(- {a} {b})"),
        }
    }
}

/// A condition: preconditions and goals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
    Atom(FluentApp),
    Compare(CmpOp, Term, Term),
}

impl Expr {
    /// The empty conjunction, which always holds.
    pub fn truth() -> Expr {
        Expr::And(Vec::new())
    }

    pub fn atom(fluent: &str, args: &[&str]) -> Expr {
        Expr::Atom(FluentApp::ground(fluent, args))
    }

    pub fn negate(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    /// Top-level conjuncts; a non-conjunction is its own single conjunct.
    pub fn conjuncts(&self) -> Vec<&Expr> {
        match self {
            Expr::And(items) => items.iter().flat_map(|e| e.conjuncts()).collect(),
            other => vec![other],
        }
    }

    /// Visit every fluent application, with a flag telling whether it sits
    /// in a numeric position.
    pub fn visit_apps<'a>(&'a self, f: &mut impl FnMut(&'a FluentApp, bool)) {
        match self {
            Expr::And(items) | Expr::Or(items) => items.iter().for_each(|e| e.visit_apps(f)),
            Expr::Not(e) => e.visit_apps(f),
            Expr::Atom(app) => f(app, false),
            Expr::Compare(_, l, r) => {
                visit_term_apps(l, f);
                visit_term_apps(r, f);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_apps(&mut |app, _| out.extend(app.vars().map(str::to_string)));
        out
    }

    pub fn map_args(&self, f: &impl Fn(&Arg) -> Arg) -> Expr {
        match self {
            Expr::And(items) => Expr::And(items.iter().map(|e| e.map_args(f)).collect()),
            Expr::Or(items) => Expr::Or(items.iter().map(|e| e.map_args(f)).collect()),
            Expr::Not(e) => Expr::Not(Box::new(e.map_args(f))),
            Expr::Atom(app) => Expr::Atom(map_app(app, f)),
            Expr::Compare(op, l, r) => Expr::Compare(*op, l.map_args(f), r.map_args(f)),
        }
    }

    /// Whether a `not` appears anywhere in the condition.
    pub fn has_negation(&self) -> bool {
        match self {
            Expr::And(items) | Expr::Or(items) => items.iter().any(Expr::has_negation),
            Expr::Not(_) => true,
            Expr::Atom(_) | Expr::Compare(..) => false,
        }
    }

    pub fn has_disjunction(&self) -> bool {
        match self {
            Expr::Or(_) => true,
            Expr::And(items) => items.iter().any(Expr::has_disjunction),
            Expr::Not(e) => e.has_disjunction(),
            Expr::Atom(_) | Expr::Compare(..) => false,
        }
    }
}

fn visit_term_apps<'a>(t: &'a Term, f: &mut impl FnMut(&'a FluentApp, bool)) {
    match t {
        Term::Const(_) => {}
        Term::Fluent(app) => f(app, true),
        Term::Add(a, b) | Term::Sub(a, b) => {
            visit_term_apps(a, f);
            visit_term_apps(b, f);
        }
    }
}

fn map_app(app: &FluentApp, f: &impl Fn(&Arg) -> Arg) -> FluentApp {
    FluentApp {
        fluent: app.fluent.clone(),
        args: app.args.iter().map(f).collect(),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::And(items) | Expr::Or(items) => {
                let head = if matches!(self, Expr::And(_)) {
                    "and"
                } else {
                    "or"
                };
                write!(f, "({head}")?;
                for e in items {
                    write!(f, " {e}")?;
                }
                f.write_str(")")
            }
            Expr::Not(e) => write!(f, "(not {e})"),
            Expr::Atom(app) => write!(f, "{app}"),
            Expr::Compare(op, l, r) => write!(f, "({} {l} {r})", op.symbol()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NumericOp {
    Increase,
    Decrease,
    Assign,
}

impl NumericOp {
    pub fn keyword(self) -> &'static str {
        match self {
            NumericOp::Increase => "increase",
            NumericOp::Decrease => "decrease",
            NumericOp::Assign => "assign",
        }
    }
}

/// A single action effect.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Effect {
    /// Set a boolean fluent true (add) or false (delete).
    Set { atom: FluentApp, value: bool },
    Numeric {
        op: NumericOp,
        target: FluentApp,
        value: Term,
    },
}

impl Effect {
    pub fn add(atom: FluentApp) -> Effect {
        Effect::Set { atom, value: true }
    }

    pub fn delete(atom: FluentApp) -> Effect {
        Effect::Set { atom, value: false }
    }

    pub fn target(&self) -> &FluentApp {
        match self {
            Effect::Set { atom, .. } => atom,
            Effect::Numeric { target, .. } => target,
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self.target().vars().map(str::to_string).collect();
        if let Effect::Numeric { value, .. } = self {
            let mut apps = Vec::new();
            value.fluents(&mut apps);
            for app in &apps {
                out.extend(app.vars().map(str::to_string));
            }
        }
        out
    }

    pub fn map_args(&self, f: &impl Fn(&Arg) -> Arg) -> Effect {
        match self {
            Effect::Set { atom, value } => Effect::Set {
                atom: map_app(atom, f),
                value: *value,
            },
            Effect::Numeric { op, target, value } => Effect::Numeric {
                op: *op,
                target: map_app(target, f),
                value: value.map_args(f),
            },
        }
    }
}

impl fmt::Display for Effect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Effect::Set { atom, value: true } => write!(f, "{atom}"),
            Effect::Set { atom, value: false } => write!(f, "(not {atom})"),
            Effect::Numeric { op, target, value } => {
                write!(f, "({} {target} {value})", op.keyword())
            }
        }
    }
}

macro_rules! sexpr_serde {
    ($ty:ty, $parse:path) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                $parse(&text).map_err(serde::de::Error::custom)
            }
        }
    };
}

sexpr_serde!(Expr, crate::pddl::parse_expr);
sexpr_serde!(Effect, crate::pddl::parse_effect);
sexpr_serde!(Term, crate::pddl::parse_term);
