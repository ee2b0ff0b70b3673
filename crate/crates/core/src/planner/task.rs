//! Grounding a problem into a propositional/numeric search task.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::ir::{
    self, ActionSchema, Binding, CmpOp, Effect, Expr, FluentApp, GroundAtom, NumericOp,
    ProblemInstance, Term,
};
use crate::number::Number;

/// `sum(coeff * var) + constant` over dynamic numeric atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinExpr {
    pub terms: Vec<(usize, Number)>,
    pub constant: Number,
}

impl LinExpr {
    fn constant(c: Number) -> Self {
        LinExpr {
            terms: Vec::new(),
            constant: c,
        }
    }

    fn scaled(mut self, k: Number) -> Self {
        for (_, c) in &mut self.terms {
            *c = *c * k;
        }
        self.constant = self.constant * k;
        self
    }

    fn plus(mut self, other: LinExpr) -> Self {
        let mut map: BTreeMap<usize, Number> = self.terms.drain(..).collect();
        for (v, c) in other.terms {
            let e = map.entry(v).or_insert(Number::ZERO);
            *e = *e + c;
        }
        self.terms = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        self.constant = self.constant + other.constant;
        self
    }

    pub fn eval(&self, values: &[Number]) -> Number {
        self.terms
            .iter()
            .fold(self.constant, |acc, (v, c)| acc + *c * values[*v])
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `expr op 0`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NumCond {
    pub op: CmpOp,
    pub expr: LinExpr,
}

impl NumCond {
    pub fn holds(&self, values: &[Number]) -> bool {
        self.op.holds(&self.expr.eval(values), &Number::ZERO)
    }
}

/// A conjunction of ground literals. Numeric conditions are indices into
/// [`GroundTask::conditions`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Conjunction {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub num: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumEffect {
    pub op: NumericOp,
    pub target: usize,
    pub value: LinExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: String,
    pub args: Vec<String>,
    pub pre: Conjunction,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pub num: Vec<NumEffect>,
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.schema, self.args.join(", "))
    }
}

/// Search node payload: boolean atoms as a bitset plus numeric values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SearchState {
    pub bits: Vec<u64>,
    pub values: Vec<Number>,
}

impl SearchState {
    pub fn new(atoms: usize, values: Vec<Number>) -> Self {
        SearchState {
            bits: vec![0; atoms.div_ceil(64)],
            values,
        }
    }

    pub fn has(&self, atom: usize) -> bool {
        self.bits[atom / 64] >> (atom % 64) & 1 == 1
    }

    pub fn set(&mut self, atom: usize, on: bool) {
        let mask = 1u64 << (atom % 64);
        if on {
            self.bits[atom / 64] |= mask;
        } else {
            self.bits[atom / 64] &= !mask;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTask {
    /// Dynamic boolean atoms, indexed by bit position.
    pub atoms: Vec<GroundAtom>,
    /// Dynamic numeric atoms, indexed by value position.
    pub numeric: Vec<GroundAtom>,
    /// Distinct numeric conditions used by actions and the goal.
    pub conditions: Vec<NumCond>,
    pub actions: Vec<GroundAction>,
    pub init: SearchState,
    /// Goal in disjunctive normal form; empty means unreachable.
    pub goal: Vec<Conjunction>,
}

impl GroundTask {
    pub fn satisfies(&self, state: &SearchState, c: &Conjunction) -> bool {
        c.pos.iter().all(|&p| state.has(p))
            && c.neg.iter().all(|&p| !state.has(p))
            && c.num
                .iter()
                .all(|&n| self.conditions[n].holds(&state.values))
    }

    pub fn is_goal(&self, state: &SearchState) -> bool {
        self.goal.iter().any(|c| self.satisfies(state, c))
    }

    pub fn applicable(&self, state: &SearchState, a: &GroundAction) -> bool {
        self.satisfies(state, &a.pre)
    }

    /// Successor state; numeric right-hand sides read the old state.
    pub fn apply(&self, state: &SearchState, a: &GroundAction) -> SearchState {
        let mut next = state.clone();
        for &d in &a.del {
            next.set(d, false);
        }
        for &p in &a.add {
            next.set(p, true);
        }
        for e in &a.num {
            let v = e.value.eval(&state.values);
            let cur = state.values[e.target];
            next.values[e.target] = match e.op {
                NumericOp::Increase => cur + v,
                NumericOp::Decrease => cur - v,
                NumericOp::Assign => v,
            };
        }
        next
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("numeric atom `{0}` is used but has no initial value")]
    Uninitialized(GroundAtom),
    #[error("problem is not valid: {0}")]
    Invalid(String),
}

struct Grounder<'a> {
    problem: &'a ProblemInstance,
    /// Fluents that no action effect touches.
    static_fluents: BTreeSet<&'a str>,
    atom_index: HashMap<GroundAtom, usize>,
    atoms: Vec<GroundAtom>,
    num_index: HashMap<GroundAtom, usize>,
    numeric: Vec<GroundAtom>,
    cond_index: HashMap<NumCond, usize>,
    conditions: Vec<NumCond>,
}

/// Disjunction of conjunctions built while grounding a condition.
type Dnf = Vec<Conjunction>;

impl<'a> Grounder<'a> {
    fn atom(&mut self, a: GroundAtom) -> usize {
        if let Some(&i) = self.atom_index.get(&a) {
            return i;
        }
        let i = self.atoms.len();
        self.atom_index.insert(a.clone(), i);
        self.atoms.push(a);
        i
    }

    fn numeric_var(&mut self, a: GroundAtom) -> Result<usize, GroundError> {
        if let Some(&i) = self.num_index.get(&a) {
            return Ok(i);
        }
        if !self.problem.init.numeric.contains_key(&a) {
            return Err(GroundError::Uninitialized(a));
        }
        let i = self.numeric.len();
        self.num_index.insert(a.clone(), i);
        self.numeric.push(a);
        Ok(i)
    }

    fn condition(&mut self, c: NumCond) -> usize {
        if let Some(&i) = self.cond_index.get(&c) {
            return i;
        }
        let i = self.conditions.len();
        self.cond_index.insert(c.clone(), i);
        self.conditions.push(c);
        i
    }

    fn ground(app: &FluentApp, binding: &Binding) -> GroundAtom {
        ir::ground_app(app, binding).expect("validated schema has no unbound variables")
    }

    fn term(&mut self, t: &Term, binding: &Binding) -> Result<LinExpr, GroundError> {
        Ok(match t {
            Term::Const(c) => LinExpr::constant(*c),
            Term::Fluent(app) => {
                let atom = Self::ground(app, binding);
                if self.static_fluents.contains(app.fluent.as_str()) {
                    let v = self
                        .problem
                        .init
                        .value(&atom)
                        .ok_or(GroundError::Uninitialized(atom))?;
                    LinExpr::constant(v)
                } else {
                    LinExpr {
                        terms: vec![(self.numeric_var(atom)?, Number::from_int(1))],
                        constant: Number::ZERO,
                    }
                }
            }
            Term::Add(a, b) => self.term(a, binding)?.plus(self.term(b, binding)?),
            Term::Sub(a, b) => {
                let rhs = self.term(b, binding)?.scaled(Number::from_int(-1));
                self.term(a, binding)?.plus(rhs)
            }
        })
    }

    /// DNF of `expr` (or of its negation when `positive` is false).
    fn dnf(&mut self, expr: &Expr, binding: &Binding, positive: bool) -> Result<Dnf, GroundError> {
        let truth = || vec![Conjunction::default()];
        match expr {
            Expr::And(items) | Expr::Or(items) => {
                let conjunctive = matches!(expr, Expr::And(_)) == positive;
                let mut parts = Vec::with_capacity(items.len());
                for e in items {
                    parts.push(self.dnf(e, binding, positive)?);
                }
                if conjunctive {
                    let mut acc = truth();
                    for part in parts {
                        let mut next = Vec::new();
                        for a in &acc {
                            for b in &part {
                                if let Some(c) = merge(a, b) {
                                    next.push(c);
                                }
                            }
                        }
                        acc = next;
                    }
                    Ok(dedup(acc))
                } else {
                    Ok(dedup(parts.into_iter().flatten().collect()))
                }
            }
            Expr::Not(e) => self.dnf(e, binding, !positive),
            Expr::Atom(app) => {
                let atom = Self::ground(app, binding);
                if self.static_fluents.contains(app.fluent.as_str()) {
                    let holds = self.problem.init.holds(&atom);
                    return Ok(if holds == positive {
                        truth()
                    } else {
                        Vec::new()
                    });
                }
                let i = self.atom(atom);
                let mut c = Conjunction::default();
                if positive {
                    c.pos.push(i);
                } else {
                    c.neg.push(i);
                }
                Ok(vec![c])
            }
            Expr::Compare(op, l, r) => {
                let lhs = self.term(l, binding)?;
                let rhs = self.term(r, binding)?.scaled(Number::from_int(-1));
                let diff = lhs.plus(rhs);
                let ops: Vec<CmpOp> = if positive {
                    vec![*op]
                } else {
                    match op.negated() {
                        Some(n) => vec![n],
                        None => vec![CmpOp::Lt, CmpOp::Gt],
                    }
                };
                let mut out = Vec::new();
                for op in ops {
                    if diff.is_constant() {
                        if op.holds(&diff.constant, &Number::ZERO) {
                            return Ok(truth());
                        }
                        continue;
                    }
                    let idx = self.condition(NumCond {
                        op,
                        expr: diff.clone(),
                    });
                    out.push(Conjunction {
                        num: vec![idx],
                        ..Conjunction::default()
                    });
                }
                Ok(out)
            }
        }
    }

    fn action(
        &mut self,
        schema: &ActionSchema,
        args: Vec<String>,
    ) -> Result<Vec<GroundAction>, GroundError> {
        let binding: Binding = schema
            .parameters
            .iter()
            .map(|p| p.name.clone())
            .zip(args.iter().cloned())
            .collect();
        let pre = self.dnf(&schema.precondition, &binding, true)?;
        if pre.is_empty() {
            return Ok(Vec::new());
        }

        let mut add = BTreeSet::new();
        let mut del = BTreeSet::new();
        let mut num = Vec::new();
        let mut targets = BTreeSet::new();
        for e in &schema.effects {
            match e {
                Effect::Set { atom, value } => {
                    let i = self.atom(Self::ground(atom, &binding));
                    if *value {
                        add.insert(i);
                    } else {
                        del.insert(i);
                    }
                }
                Effect::Numeric { op, target, value } => {
                    let t = self.numeric_var(Self::ground(target, &binding))?;
                    if !targets.insert(t) {
                        return Ok(Vec::new());
                    }
                    num.push(NumEffect {
                        op: *op,
                        target: t,
                        value: self.term(value, &binding)?,
                    });
                }
            }
        }
        if !add.is_disjoint(&del) {
            return Ok(Vec::new());
        }
        let add: Vec<usize> = add.into_iter().collect();
        let del: Vec<usize> = del.into_iter().collect();
        Ok(pre
            .into_iter()
            .map(|pre| GroundAction {
                schema: schema.name.clone(),
                args: args.clone(),
                pre,
                add: add.clone(),
                del: del.clone(),
                num: num.clone(),
            })
            .collect())
    }
}

fn merge(a: &Conjunction, b: &Conjunction) -> Option<Conjunction> {
    let pos: BTreeSet<usize> = a.pos.iter().chain(&b.pos).copied().collect();
    let neg: BTreeSet<usize> = a.neg.iter().chain(&b.neg).copied().collect();
    if !pos.is_disjoint(&neg) {
        return None;
    }
    let num: BTreeSet<usize> = a.num.iter().chain(&b.num).copied().collect();
    Some(Conjunction {
        pos: pos.into_iter().collect(),
        neg: neg.into_iter().collect(),
        num: num.into_iter().collect(),
    })
}

fn dedup(mut v: Dnf) -> Dnf {
    let mut seen = std::collections::HashSet::new();
    v.retain(|c| seen.insert(c.clone()));
    v
}

/// Instantiate every action schema over the problem's objects.
///
/// Ground actions come out in schema order, then lexicographic argument
/// order. Instantiations with an unsatisfiable static precondition or with
/// overlapping add and delete sets are dropped; a disjunctive precondition
/// yields one ground action per disjunct.
pub fn ground(problem: &ProblemInstance) -> Result<GroundTask, GroundError> {
    // Missing numeric values are reported below, naming the first atom the
    // grounding actually reads.
    let mut report = ir::validate(problem);
    report
        .violations
        .retain(|v| v.code != ir::ViolationCode::UninitializedNumeric);
    if !report.is_valid() {
        return Err(GroundError::Invalid(report.to_string()));
    }
    let domain = &problem.domain;
    let mut dynamic: BTreeSet<&str> = BTreeSet::new();
    for a in &domain.actions {
        for e in &a.effects {
            dynamic.insert(e.target().fluent.as_str());
        }
    }
    let static_fluents = domain
        .fluents
        .iter()
        .map(|f| f.name.as_str())
        .filter(|f| !dynamic.contains(f))
        .collect();

    let mut g = Grounder {
        problem,
        static_fluents,
        atom_index: HashMap::new(),
        atoms: Vec::new(),
        num_index: HashMap::new(),
        numeric: Vec::new(),
        cond_index: HashMap::new(),
        conditions: Vec::new(),
    };
    // Initial atoms of dynamic fluents get the lowest indices.
    for atom in &problem.init.atoms {
        if dynamic.contains(atom.fluent.as_str()) {
            g.atom(atom.clone());
        }
    }

    let mut actions = Vec::new();
    for schema in &domain.actions {
        for args in ir::instantiations(domain, &problem.objects, &schema.parameters) {
            actions.extend(g.action(schema, args)?);
        }
    }
    let goal = g.dnf(&problem.goal, &Binding::new(), true)?;

    let values = g
        .numeric
        .iter()
        .map(|a| problem.init.value(a).expect("checked when indexed"))
        .collect();
    let mut init = SearchState::new(g.atoms.len(), values);
    for atom in &problem.init.atoms {
        if let Some(&i) = g.atom_index.get(atom) {
            init.set(i, true);
        }
    }
    Ok(GroundTask {
        atoms: g.atoms,
        numeric: g.numeric,
        conditions: g.conditions,
        actions,
        init,
        goal,
    })
}
