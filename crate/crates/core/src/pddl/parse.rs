//! PDDL text to IR.

use std::collections::BTreeSet;

use super::error::{PddlError, PddlErrorCode as Code};
use super::lexer::{PddlText, Sexpr, Span};
use crate::ir::{
    self, ActionSchema, Arg, Assignment, CmpOp, DomainModel, Effect, Expr, FluentApp, FluentDecl,
    FluentKind, GroundAtom, NumericOp, ObjectDecl, Param, ProblemInstance, Term, TypeDecl,
    UNIVERSAL_TYPE,
};
use crate::number::Number;

type PResult<T> = Result<T, PddlError>;

const SUPPORTED_REQUIREMENTS: &[&str] = &[
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":numeric-fluents",
    ":fluents",
];

const UNSUPPORTED_REQUIREMENTS: &[&str] = &[
    ":adl",
    ":equality",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
    ":conditional-effects",
    ":object-fluents",
    ":durative-actions",
    ":duration-inequalities",
    ":continuous-effects",
    ":derived-predicates",
    ":timed-initial-literals",
    ":preferences",
    ":constraints",
    ":action-costs",
];

fn err(code: Code, msg: impl Into<String>, span: Span) -> PddlError {
    PddlError::new(code, msg, span)
}

fn expect_list<'a>(s: &'a Sexpr, what: &str) -> PResult<&'a [Sexpr]> {
    s.as_list()
        .ok_or_else(|| err(Code::Syntax, format!("expected {what}"), s.span()))
}

fn expect_symbol<'a>(s: &'a Sexpr, what: &str) -> PResult<&'a str> {
    s.as_symbol()
        .ok_or_else(|| err(Code::Syntax, format!("expected {what}"), s.span()))
}

/// What names an expression may mention, used to check a parse against
/// declarations while source spans are still at hand.
#[derive(Default)]
struct Env<'a> {
    fluents: Option<&'a [FluentDecl]>,
    /// Variables in scope; `None` disallows variables entirely.
    vars: Option<BTreeSet<String>>,
    /// Declared objects; `None` disallows object arguments.
    objects: Option<BTreeSet<String>>,
    /// Without declarations every name is accepted.
    free: bool,
}

impl Env<'_> {
    fn free() -> Self {
        Env {
            free: true,
            ..Env::default()
        }
    }
}

fn parse_arg(s: &Sexpr, env: &Env<'_>) -> PResult<Arg> {
    let name = expect_symbol(s, "an argument name")?;
    if let Some(v) = name.strip_prefix('?') {
        if v.is_empty() {
            return Err(err(Code::Syntax, "empty variable name", s.span()));
        }
        if !env.free {
            match &env.vars {
                Some(vars) if vars.contains(v) => {}
                Some(_) => {
                    return Err(err(
                        Code::Semantic,
                        format!("unbound variable `{name}`"),
                        s.span(),
                    ))
                }
                None => {
                    return Err(err(
                        Code::Syntax,
                        format!("variable `{name}` is not allowed here"),
                        s.span(),
                    ))
                }
            }
        }
        return Ok(Arg::Var(v.to_string()));
    }
    if !env.free {
        match &env.objects {
            Some(objs) if objs.contains(name) => {}
            Some(_) => {
                return Err(err(
                    Code::UndeclaredObject,
                    format!("undeclared object `{name}`"),
                    s.span(),
                ))
            }
            None => {
                return Err(err(
                    Code::UnsupportedFeature,
                    format!("constant `{name}` in a domain is not supported"),
                    s.span(),
                ))
            }
        }
    }
    Ok(Arg::Obj(name.to_string()))
}

/// `(name arg ...)` checked against declarations when available.
fn parse_app(items: &[Sexpr], span: Span, kind: FluentKind, env: &Env<'_>) -> PResult<FluentApp> {
    let name = expect_symbol(&items[0], "a fluent name")?;
    let args = items[1..]
        .iter()
        .map(|a| parse_arg(a, env))
        .collect::<PResult<Vec<_>>>()?;
    if let Some(decls) = env.fluents {
        let Some(decl) = decls.iter().find(|f| f.name == name) else {
            return Err(err(
                Code::UndeclaredFluent,
                format!("undeclared fluent `{name}`"),
                items[0].span(),
            ));
        };
        if decl.kind != kind {
            let want = match kind {
                FluentKind::Boolean => "a predicate",
                FluentKind::Numeric => "a numeric function",
            };
            return Err(err(Code::Semantic, format!("`{name}` is not {want}"), span));
        }
        if decl.parameters.len() != args.len() {
            return Err(err(
                Code::Semantic,
                format!(
                    "`{name}` takes {} argument(s), found {}",
                    decl.parameters.len(),
                    args.len()
                ),
                span,
            ));
        }
    }
    Ok(FluentApp::new(name, args))
}

fn parse_number(s: &str) -> Option<Number> {
    if s.contains('/') {
        return None;
    }
    s.parse().ok()
}

fn parse_term_sexpr(s: &Sexpr, env: &Env<'_>) -> PResult<Term> {
    match s {
        Sexpr::Symbol(sym, span) => parse_number(sym).map(Term::Const).ok_or_else(|| {
            err(
                Code::Syntax,
                format!("expected a numeric term, found `{sym}`"),
                *span,
            )
        }),
        Sexpr::List(items, span) => {
            let Some(head) = items.first() else {
                return Err(err(Code::Syntax, "empty numeric term", *span));
            };
            match head.as_symbol() {
                Some("+") | Some("-") => {
                    let is_add = head.as_symbol() == Some("+");
                    let operands = items[1..]
                        .iter()
                        .map(|t| parse_term_sexpr(t, env))
                        .collect::<PResult<Vec<_>>>()?;
                    let mut it = operands.into_iter();
                    let Some(first) = it.next() else {
                        return Err(err(Code::Syntax, "arithmetic needs operands", *span));
                    };
                    let rest: Vec<Term> = it.collect();
                    if rest.is_empty() {
                        return if is_add {
                            Ok(first)
                        } else {
                            Ok(Term::Sub(
                                Box::new(Term::Const(Number::ZERO)),
                                Box::new(first),
                            ))
                        };
                    }
                    Ok(rest.into_iter().fold(first, |acc, t| {
                        if is_add {
                            Term::Add(Box::new(acc), Box::new(t))
                        } else {
                            Term::Sub(Box::new(acc), Box::new(t))
                        }
                    }))
                }
                Some(op @ ("*" | "/")) => {
                    let consts: Option<Vec<Number>> = items[1..]
                        .iter()
                        .map(|t| t.as_symbol().and_then(parse_number))
                        .collect();
                    match (op, consts.as_deref()) {
                        ("/", Some([p, q])) if p.is_integer() && q.is_integer() && !q.is_zero() => {
                            Ok(Term::Const(Number::new(p.numer(), q.numer())))
                        }
                        _ => Err(err(
                            Code::UnsupportedFeature,
                            format!("`{op}` is only supported between two integer literals"),
                            *span,
                        )),
                    }
                }
                Some(_) => Ok(Term::Fluent(parse_app(
                    items,
                    *span,
                    FluentKind::Numeric,
                    env,
                )?)),
                None => Err(err(Code::Syntax, "expected a numeric term", *span)),
            }
        }
    }
}

fn parse_expr_sexpr(s: &Sexpr, env: &Env<'_>) -> PResult<Expr> {
    let Sexpr::List(items, span) = s else {
        return Err(err(
            Code::Syntax,
            "expected a parenthesized condition",
            s.span(),
        ));
    };
    let span = *span;
    let Some(head) = items.first() else {
        return Ok(Expr::truth());
    };
    let head_name = expect_symbol(head, "a condition keyword or fluent name")?;
    match head_name {
        "and" | "or" => {
            let parts = items[1..]
                .iter()
                .map(|e| parse_expr_sexpr(e, env))
                .collect::<PResult<Vec<_>>>()?;
            Ok(if head_name == "and" {
                Expr::And(parts)
            } else {
                Expr::Or(parts)
            })
        }
        "not" => {
            if items.len() != 2 {
                return Err(err(Code::Syntax, "`not` takes exactly one condition", span));
            }
            Ok(Expr::negate(parse_expr_sexpr(&items[1], env)?))
        }
        "imply" | "forall" | "exists" | "preference" => Err(err(
            Code::UnsupportedFeature,
            format!("`{head_name}` conditions are not supported"),
            span,
        )),
        _ => {
            if let Some(op) = CmpOp::from_symbol(head_name) {
                if items.len() != 3 {
                    return Err(err(
                        Code::Syntax,
                        format!("`{head_name}` takes two operands"),
                        span,
                    ));
                }
                if op == CmpOp::Eq
                    && items[1..]
                        .iter()
                        .all(|x| x.as_symbol().is_some_and(|s| parse_number(s).is_none()))
                {
                    return Err(err(
                        Code::UnsupportedFeature,
                        "equality between objects is not supported",
                        span,
                    ));
                }
                let l = parse_term_sexpr(&items[1], env)?;
                let r = parse_term_sexpr(&items[2], env)?;
                return Ok(Expr::Compare(op, l, r));
            }
            Ok(Expr::Atom(parse_app(
                items,
                span,
                FluentKind::Boolean,
                env,
            )?))
        }
    }
}

fn parse_effects_into(s: &Sexpr, env: &Env<'_>, out: &mut Vec<Effect>) -> PResult<()> {
    let Sexpr::List(items, span) = s else {
        return Err(err(
            Code::Syntax,
            "expected a parenthesized effect",
            s.span(),
        ));
    };
    let span = *span;
    let Some(head) = items.first() else {
        return Ok(());
    };
    let head_name = expect_symbol(head, "an effect keyword or fluent name")?;
    match head_name {
        "and" => {
            for e in &items[1..] {
                parse_effects_into(e, env, out)?;
            }
            Ok(())
        }
        "not" => {
            if items.len() != 2 {
                return Err(err(Code::Syntax, "`not` takes exactly one atom", span));
            }
            let inner = expect_list(&items[1], "an atom")?;
            if inner.is_empty() {
                return Err(err(Code::Syntax, "empty atom", items[1].span()));
            }
            out.push(Effect::delete(parse_app(
                inner,
                items[1].span(),
                FluentKind::Boolean,
                env,
            )?));
            Ok(())
        }
        "increase" | "decrease" | "assign" => {
            if items.len() != 3 {
                return Err(err(
                    Code::Syntax,
                    format!("`{head_name}` takes a target and a value"),
                    span,
                ));
            }
            let target = expect_list(&items[1], "a numeric fluent")?;
            if target.is_empty() {
                return Err(err(Code::Syntax, "empty numeric fluent", items[1].span()));
            }
            let op = match head_name {
                "increase" => NumericOp::Increase,
                "decrease" => NumericOp::Decrease,
                _ => NumericOp::Assign,
            };
            out.push(Effect::Numeric {
                op,
                target: parse_app(target, items[1].span(), FluentKind::Numeric, env)?,
                value: parse_term_sexpr(&items[2], env)?,
            });
            Ok(())
        }
        "when" | "forall" | "scale-up" | "scale-down" => Err(err(
            Code::UnsupportedFeature,
            format!("`{head_name}` effects are not supported"),
            span,
        )),
        _ => {
            out.push(Effect::add(parse_app(
                items,
                span,
                FluentKind::Boolean,
                env,
            )?));
            Ok(())
        }
    }
}

/// Parse a standalone condition such as `(and (clear ?b) (not (on ?a ?b)))`.
pub fn parse_expr(text: &str) -> PResult<Expr> {
    parse_expr_sexpr(&PddlText::new(text).read_one()?, &Env::free())
}

/// Parse a single effect literal or numeric update.
pub fn parse_effect(text: &str) -> PResult<Effect> {
    let s = PddlText::new(text).read_one()?;
    let mut out = Vec::new();
    parse_effects_into(&s, &Env::free(), &mut out)?;
    match out.len() {
        1 => Ok(out.remove(0)),
        n => Err(err(
            Code::Syntax,
            format!("expected one effect, found {n}"),
            s.span(),
        )),
    }
}

/// Parse an effect list, flattening `(and ...)`.
pub fn parse_effects(text: &str) -> PResult<Vec<Effect>> {
    let s = PddlText::new(text).read_one()?;
    let mut out = Vec::new();
    parse_effects_into(&s, &Env::free(), &mut out)?;
    Ok(out)
}

pub fn parse_term(text: &str) -> PResult<Term> {
    parse_term_sexpr(&PddlText::new(text).read_one()?, &Env::free())
}

struct Typed<'a> {
    name: &'a str,
    name_span: Span,
    ty: String,
    ty_span: Span,
}

/// `a b - t c` style list; untyped trailing names get the universal type.
fn typed_list(items: &[Sexpr]) -> PResult<Vec<Typed<'_>>> {
    let mut out = Vec::new();
    let mut pending: Vec<(&str, Span)> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let sym = expect_symbol(&items[i], "a name")?;
        if sym == "-" {
            let Some(ty_sexpr) = items.get(i + 1) else {
                return Err(err(
                    Code::Syntax,
                    "`-` must be followed by a type",
                    items[i].span(),
                ));
            };
            if ty_sexpr.head() == Some("either") {
                return Err(err(
                    Code::UnsupportedFeature,
                    "`either` types are not supported",
                    ty_sexpr.span(),
                ));
            }
            let ty = expect_symbol(ty_sexpr, "a type name")?;
            if pending.is_empty() {
                return Err(err(
                    Code::Syntax,
                    "type annotation without names",
                    items[i].span(),
                ));
            }
            for (name, name_span) in pending.drain(..) {
                out.push(Typed {
                    name,
                    name_span,
                    ty: ty.to_string(),
                    ty_span: ty_sexpr.span(),
                });
            }
            i += 2;
        } else {
            pending.push((sym, items[i].span()));
            i += 1;
        }
    }
    for (name, name_span) in pending {
        out.push(Typed {
            name,
            name_span,
            ty: UNIVERSAL_TYPE.to_string(),
            ty_span: name_span,
        });
    }
    Ok(out)
}

fn check_type(domain: &DomainModel, ty: &str, span: Span) -> PResult<()> {
    if domain.has_type(ty) {
        Ok(())
    } else {
        Err(err(
            Code::UndeclaredType,
            format!("undeclared type `{ty}`"),
            span,
        ))
    }
}

fn variable_list(domain: &DomainModel, items: &[Sexpr]) -> PResult<Vec<Param>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in typed_list(items)? {
        let Some(name) = t.name.strip_prefix('?').filter(|n| !n.is_empty()) else {
            return Err(err(
                Code::Syntax,
                format!("expected a variable, found `{}`", t.name),
                t.name_span,
            ));
        };
        if !seen.insert(name) {
            return Err(err(
                Code::Semantic,
                format!("duplicate parameter `?{name}`"),
                t.name_span,
            ));
        }
        check_type(domain, &t.ty, t.ty_span)?;
        out.push(Param::new(name, &t.ty));
    }
    Ok(out)
}

fn check_requirements(items: &[Sexpr]) -> PResult<()> {
    for r in items {
        let name = expect_symbol(r, "a requirement keyword")?;
        if UNSUPPORTED_REQUIREMENTS.contains(&name) {
            return Err(err(
                Code::UnsupportedFeature,
                format!("requirement `{name}` is not supported"),
                r.span(),
            ));
        }
        if !SUPPORTED_REQUIREMENTS.contains(&name) {
            return Err(err(
                Code::UnknownRequirement,
                format!("unknown requirement `{name}`"),
                r.span(),
            ));
        }
    }
    Ok(())
}

/// Header `(define (<kind> NAME) ...)`; returns the name and the sections.
fn define_header<'a>(root: &'a Sexpr, kind: &str) -> PResult<(&'a str, &'a [Sexpr])> {
    let items = expect_list(root, "`(define ...)`")?;
    if items.first().and_then(Sexpr::as_symbol) != Some("define") {
        return Err(err(Code::Syntax, "expected `(define ...)`", root.span()));
    }
    let Some(header) = items.get(1) else {
        return Err(err(
            Code::Syntax,
            format!("missing `({kind} NAME)`"),
            root.span(),
        ));
    };
    let h = expect_list(header, &format!("`({kind} NAME)`"))?;
    if h.len() != 2 || h[0].as_symbol() != Some(kind) {
        return Err(err(
            Code::Syntax,
            format!("expected `({kind} NAME)`"),
            header.span(),
        ));
    }
    Ok((expect_symbol(&h[1], "a name")?, &items[2..]))
}

fn semantic_check(report: ir::ValidationReport, span: Span) -> PResult<()> {
    if report.is_valid() {
        Ok(())
    } else {
        Err(err(Code::Semantic, report.to_string(), span))
    }
}

/// Parse a domain file. The requirement flags of the result reflect the
/// features the model uses.
pub fn parse_domain(text: &str) -> PResult<DomainModel> {
    parse_domain_text(&PddlText::new(text))
}

pub fn parse_domain_text(text: &PddlText) -> PResult<DomainModel> {
    let root = text.read_one()?;
    let (name, sections) = define_header(&root, "domain")?;
    let mut domain = DomainModel::new(name);

    for section in sections {
        let items = expect_list(section, "a domain section")?;
        let Some(key) = items.first() else {
            return Err(err(Code::Syntax, "empty section", section.span()));
        };
        let key_name = expect_symbol(key, "a section keyword")?;
        let body = &items[1..];
        match key_name {
            ":requirements" => check_requirements(body)?,
            ":types" => {
                let typed = typed_list(body)?;
                for t in &typed {
                    if t.ty != UNIVERSAL_TYPE
                        && !domain.has_type(&t.ty)
                        && !typed.iter().any(|o| o.name == t.ty)
                    {
                        domain.types.push(TypeDecl::new(&t.ty, None));
                    }
                }
                for t in typed {
                    if t.name == UNIVERSAL_TYPE {
                        continue;
                    }
                    if domain.types.iter().any(|d| d.name == t.name) {
                        return Err(err(
                            Code::Semantic,
                            format!("type `{}` declared twice", t.name),
                            t.name_span,
                        ));
                    }
                    domain.types.push(TypeDecl::new(t.name, Some(&t.ty)));
                }
            }
            ":constants" => {
                return Err(err(
                    Code::UnsupportedFeature,
                    "domain constants are not supported",
                    section.span(),
                ))
            }
            ":predicates" => {
                for p in body {
                    let pi = expect_list(p, "a predicate declaration")?;
                    let Some(first) = pi.first() else {
                        return Err(err(Code::Syntax, "empty predicate declaration", p.span()));
                    };
                    let pname = expect_symbol(first, "a predicate name")?;
                    if domain.fluent(pname).is_some() {
                        return Err(err(
                            Code::Semantic,
                            format!("fluent `{pname}` declared twice"),
                            first.span(),
                        ));
                    }
                    let params = variable_list(&domain, &pi[1..])?;
                    domain.fluents.push(FluentDecl::boolean(pname, params));
                }
            }
            ":functions" => {
                let mut i = 0;
                while i < body.len() {
                    if body[i].as_symbol() == Some("-") {
                        match body.get(i + 1).and_then(Sexpr::as_symbol) {
                            Some("number") => {}
                            Some(other) => {
                                return Err(err(
                                    Code::UnsupportedFeature,
                                    format!("functions of type `{other}` are not supported"),
                                    body[i + 1].span(),
                                ))
                            }
                            None => {
                                return Err(err(
                                    Code::Syntax,
                                    "`-` must be followed by a type",
                                    body[i].span(),
                                ))
                            }
                        }
                        i += 2;
                        continue;
                    }
                    let fi = expect_list(&body[i], "a function declaration")?;
                    let Some(first) = fi.first() else {
                        return Err(err(
                            Code::Syntax,
                            "empty function declaration",
                            body[i].span(),
                        ));
                    };
                    let fname = expect_symbol(first, "a function name")?;
                    if domain.fluent(fname).is_some() {
                        return Err(err(
                            Code::Semantic,
                            format!("fluent `{fname}` declared twice"),
                            first.span(),
                        ));
                    }
                    let params = variable_list(&domain, &fi[1..])?;
                    domain.fluents.push(FluentDecl::numeric(fname, params));
                    i += 1;
                }
            }
            ":action" => {
                let action = parse_action(&domain, body, section.span())?;
                if domain.action(&action.name).is_some() {
                    return Err(err(
                        Code::Semantic,
                        format!("action `{}` declared twice", action.name),
                        section.span(),
                    ));
                }
                domain.actions.push(action);
            }
            ":durative-action" | ":derived" | ":process" | ":event" | ":constraints" => {
                return Err(err(
                    Code::UnsupportedFeature,
                    format!("`{key_name}` is not supported"),
                    key.span(),
                ))
            }
            other => {
                return Err(err(
                    Code::Syntax,
                    format!("unknown domain section `{other}`"),
                    key.span(),
                ))
            }
        }
    }

    let domain = domain.normalized();
    semantic_check(ir::validate_domain(&domain), root.span())?;
    Ok(domain)
}

fn parse_action(domain: &DomainModel, body: &[Sexpr], span: Span) -> PResult<ActionSchema> {
    let Some(name_sexpr) = body.first() else {
        return Err(err(Code::Syntax, "action has no name", span));
    };
    let name = expect_symbol(name_sexpr, "an action name")?;
    let mut parameters = Vec::new();
    let mut pre_sexpr = None;
    let mut eff_sexpr = None;
    let mut i = 1;
    while i < body.len() {
        let key = expect_symbol(&body[i], "an action keyword")?;
        let Some(value) = body.get(i + 1) else {
            return Err(err(
                Code::Syntax,
                format!("`{key}` has no value"),
                body[i].span(),
            ));
        };
        match key {
            ":parameters" => {
                parameters = variable_list(domain, expect_list(value, "a parameter list")?)?
            }
            ":precondition" => pre_sexpr = Some(value),
            ":effect" => eff_sexpr = Some(value),
            _ => {
                return Err(err(
                    Code::Syntax,
                    format!("unknown action keyword `{key}`"),
                    body[i].span(),
                ))
            }
        }
        i += 2;
    }
    let env = Env {
        fluents: Some(&domain.fluents),
        vars: Some(parameters.iter().map(|p| p.name.clone()).collect()),
        objects: None,
        free: false,
    };
    let precondition = match pre_sexpr {
        Some(p) => parse_expr_sexpr(p, &env)?,
        None => Expr::truth(),
    };
    let mut effects = Vec::new();
    if let Some(e) = eff_sexpr {
        parse_effects_into(e, &env, &mut effects)?;
    }
    Ok(ActionSchema {
        name: name.to_string(),
        parameters,
        precondition,
        effects,
    })
}

/// Parse a problem file against an already parsed domain.
pub fn parse_problem(text: &str, domain: &DomainModel) -> PResult<ProblemInstance> {
    parse_problem_text(&PddlText::new(text), domain)
}

pub fn parse_problem_text(text: &PddlText, domain: &DomainModel) -> PResult<ProblemInstance> {
    let root = text.read_one()?;
    let (name, sections) = define_header(&root, "problem")?;
    let mut objects: Vec<ObjectDecl> = Vec::new();
    let mut init = Assignment::default();
    let mut goal = Expr::truth();
    let mut init_sexpr = None;
    let mut goal_sexpr = None;

    for section in sections {
        let items = expect_list(section, "a problem section")?;
        let Some(key) = items.first() else {
            return Err(err(Code::Syntax, "empty section", section.span()));
        };
        let body = &items[1..];
        match expect_symbol(key, "a section keyword")? {
            ":domain" => {
                let dname = body
                    .first()
                    .map(|d| expect_symbol(d, "a domain name"))
                    .transpose()?
                    .unwrap_or_default();
                if dname != domain.name {
                    return Err(err(
                        Code::Semantic,
                        format!("problem is for domain `{dname}`, not `{}`", domain.name),
                        section.span(),
                    ));
                }
            }
            ":requirements" => check_requirements(body)?,
            ":objects" => {
                for t in typed_list(body)? {
                    check_type(domain, &t.ty, t.ty_span)?;
                    if objects.iter().any(|o| o.name == t.name) {
                        return Err(err(
                            Code::Semantic,
                            format!("object `{}` declared twice", t.name),
                            t.name_span,
                        ));
                    }
                    objects.push(ObjectDecl::new(t.name, &t.ty));
                }
            }
            ":init" => init_sexpr = Some(body),
            ":goal" => {
                if body.len() != 1 {
                    return Err(err(
                        Code::Syntax,
                        "`:goal` takes one condition",
                        section.span(),
                    ));
                }
                goal_sexpr = Some(&body[0]);
            }
            ":metric" | ":constraints" => {
                return Err(err(
                    Code::UnsupportedFeature,
                    "metrics and constraints are not supported",
                    key.span(),
                ))
            }
            other => {
                return Err(err(
                    Code::Syntax,
                    format!("unknown problem section `{other}`"),
                    key.span(),
                ))
            }
        }
    }

    let env = Env {
        fluents: Some(&domain.fluents),
        vars: None,
        objects: Some(objects.iter().map(|o| o.name.clone()).collect()),
        free: false,
    };
    let ground = |app: FluentApp| GroundAtom {
        fluent: app.fluent,
        args: app.args.iter().map(|a| a.name().to_string()).collect(),
    };
    for fact in init_sexpr.unwrap_or(&[]) {
        let items = expect_list(fact, "an initial fact")?;
        if items.is_empty() {
            return Err(err(Code::Syntax, "empty initial fact", fact.span()));
        }
        if items[0].as_symbol() == Some("=") {
            if items.len() != 3 {
                return Err(err(
                    Code::Syntax,
                    "`=` takes a fluent and a value",
                    fact.span(),
                ));
            }
            let target = expect_list(&items[1], "a numeric fluent")?;
            if target.is_empty() {
                return Err(err(Code::Syntax, "empty numeric fluent", items[1].span()));
            }
            let atom = ground(parse_app(
                target,
                items[1].span(),
                FluentKind::Numeric,
                &env,
            )?);
            let value = items[2]
                .as_symbol()
                .and_then(parse_number)
                .or_else(|| match parse_term_sexpr(&items[2], &env) {
                    Ok(Term::Const(c)) => Some(c),
                    _ => None,
                })
                .ok_or_else(|| {
                    err(
                        Code::Syntax,
                        "initial value must be a number",
                        items[2].span(),
                    )
                })?;
            if init.numeric.insert(atom.clone(), value).is_some() {
                return Err(err(
                    Code::Semantic,
                    format!("`{atom}` initialized twice"),
                    fact.span(),
                ));
            }
        } else if items[0].as_symbol() == Some("not") {
            return Err(err(
                Code::UnsupportedFeature,
                "only positive literals and numeric assignments may appear in `:init`",
                fact.span(),
            ));
        } else {
            init.atoms.insert(ground(parse_app(
                items,
                fact.span(),
                FluentKind::Boolean,
                &env,
            )?));
        }
    }
    if let Some(g) = goal_sexpr {
        goal = parse_expr_sexpr(g, &env)?;
    }

    let problem = ProblemInstance {
        name: name.to_string(),
        domain: domain.clone(),
        objects,
        init,
        goal,
    };
    semantic_check(ir::validate(&problem), root.span())?;
    Ok(problem)
}
