//! Plan files: one ground action per line.
//!
//! Both `move(pos-0-1, pos-0-2, h0)` and `(move pos-0-1 pos-0-2 h0)` are
//! accepted, optionally preceded by a step number such as `3.` or `0.000:`.
//! Blank lines and `;` comments are ignored.

use super::error::{PddlError, PddlErrorCode};
use super::lexer::PddlText;
use crate::planner::{Plan, PlanStep};

fn strip_step_number(line: &str) -> &str {
    let digits = line.len() - line.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    if digits == 0 {
        return line;
    }
    let mut rest = &line[digits..];
    if let Some(frac) = rest.strip_prefix('.') {
        let d = frac.len() - frac.trim_start_matches(|c: char| c.is_ascii_digit()).len();
        if d > 0 {
            rest = &frac[d..];
        }
    }
    rest = rest.strip_prefix(['.', ':', ')']).unwrap_or(rest);
    if rest.starts_with(char::is_whitespace) || rest.starts_with('(') {
        rest.trim_start()
    } else {
        line
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

pub fn parse_plan(text: &str) -> Result<Plan, PddlError> {
    let source = PddlText::new(text);
    let mut steps = Vec::new();
    let mut offset = 0;
    for raw in text.split_inclusive('\n') {
        let line_start = offset;
        offset += raw.len();
        let content = raw.split(';').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let col = raw.find(|c: char| !c.is_whitespace()).unwrap_or(0);
        let fail = |msg: String| {
            PddlError::new(
                PddlErrorCode::Syntax,
                msg,
                source.span(line_start + col, content.len()),
            )
        };
        let body = strip_step_number(content);
        let body = match body.rfind('[') {
            Some(i) if body.ends_with(']') => body[..i].trim_end(),
            _ => body,
        };
        let (name, args): (&str, Vec<&str>) = if let Some(inner) = body.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| fail(format!("unbalanced step `{content}`")))?;
            let mut parts = inner.split_whitespace();
            let name = parts.next().unwrap_or("");
            (name, parts.collect())
        } else if let Some(open) = body.find('(') {
            let inner = body[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| fail(format!("unbalanced step `{content}`")))?;
            let args = if inner.trim().is_empty() {
                Vec::new()
            } else {
                inner.split(',').map(str::trim).collect()
            };
            (body[..open].trim(), args)
        } else {
            (body, Vec::new())
        };
        if !is_name(name) {
            return Err(fail(format!("malformed action name in `{content}`")));
        }
        if let Some(bad) = args.iter().find(|a| !is_name(a)) {
            return Err(fail(format!("malformed argument `{bad}` in `{content}`")));
        }
        steps.push(PlanStep::new(
            &name.to_ascii_lowercase(),
            args.iter().map(|a| a.to_ascii_lowercase()).collect(),
        ));
    }
    Ok(Plan::new(steps))
}
