//! Set and box arguments. Each is a path to a JSON file, inline JSON, or a
//! short inline form:
//!
//! - boxes: `[0,1]x[-inf,2]` (one interval per coordinate)
//! - constraints: `{y1<=y2, y>=0, 2*x1 - x2 = 1}` (variables are a letter
//!   plus a 1-based index; a bare letter is coordinate 1; `{}` is the whole
//!   space)

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use polyinv::geometry::json;
use polyinv::{HalfSpace, Hyperbox, PolyUnion, Polyhedron};
use serde_json::Value;

fn load(arg: &str) -> Result<String> {
    let path = Path::new(arg);
    if path.is_file() {
        return fs::read_to_string(path).with_context(|| format!("reading {arg}"));
    }
    Ok(arg.to_string())
}

fn as_json_object(text: &str) -> Option<Value> {
    // `{}` is the empty constraint list, not an empty JSON object
    serde_json::from_str::<Value>(text)
        .ok()
        .filter(|v| v.as_object().is_some_and(|o| !o.is_empty()))
}

pub fn parse_set_arg(arg: &str, dim: usize) -> Result<PolyUnion> {
    let text = load(arg)?;
    let text = text.trim();
    if let Some(v) = as_json_object(text) {
        return Ok(json::parse_set(&v, Some(dim))?);
    }
    if text.starts_with('[') {
        let b = parse_inline_box(text)?;
        check_dim(b.dim(), dim)?;
        return Ok(PolyUnion::from(b.to_polyhedron()));
    }
    if text.starts_with('{') {
        return Ok(PolyUnion::from(parse_constraints(text, dim)?));
    }
    bail!("cannot read set {arg:?}: not a file, JSON set, box or constraint list")
}

pub fn parse_box_arg(arg: &str, dim: usize) -> Result<Hyperbox> {
    let text = load(arg)?;
    let text = text.trim();
    let b = match as_json_object(text) {
        Some(v) => json::parse_box(&v)?,
        None => parse_inline_box(text)?,
    };
    check_dim(b.dim(), dim)?;
    Ok(b)
}

/// A box with whatever dimension it declares (for plot clipping).
pub fn parse_box_any(arg: &str) -> Result<Hyperbox> {
    let text = load(arg)?;
    let text = text.trim();
    match as_json_object(text) {
        Some(v) => Ok(json::parse_box(&v)?),
        None => parse_inline_box(text),
    }
}

fn check_dim(found: usize, want: usize) -> Result<()> {
    if found != want {
        bail!("expected a {want}-dimensional set, found dimension {found}");
    }
    Ok(())
}

fn number(tok: &str) -> Result<f64> {
    match tok.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| anyhow!("not a number: {t:?}")),
    }
}

fn parse_inline_box(text: &str) -> Result<Hyperbox> {
    let mut lo = Vec::new();
    let mut hi = Vec::new();
    for piece in text.split(['x', '×']) {
        let inner = piece
            .trim()
            .strip_prefix('[')
            .and_then(|s| s.strip_suffix(']'))
            .ok_or_else(|| anyhow!("malformed interval {piece:?} in box {text:?}"))?;
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| anyhow!("interval {piece:?} needs two endpoints"))?;
        lo.push(number(a)?);
        hi.push(number(b)?);
    }
    Ok(Hyperbox::new(lo, hi)?)
}

fn parse_constraints(text: &str, dim: usize) -> Result<Polyhedron> {
    let inner = text
        .strip_prefix('{')
        .and_then(|s| s.strip_suffix('}'))
        .ok_or_else(|| anyhow!("constraint list must be wrapped in braces"))?;
    let mut rows = Vec::new();
    for item in inner.split([',', ';']).map(str::trim).filter(|s| !s.is_empty()) {
        let (op, at) = ["<=", ">=", "="]
            .iter()
            .find_map(|op| item.find(op).map(|i| (*op, i)))
            .ok_or_else(|| anyhow!("constraint {item:?} has no <=, >= or ="))?;
        let (lhs, rhs) = (&item[..at], &item[at + op.len()..]);
        let (a, a0) = linear(lhs, dim)?;
        let (b, b0) = linear(rhs, dim)?;
        // lhs - rhs <= 0
        let normal: Vec<f64> = a.iter().zip(&b).map(|(u, v)| u - v).collect();
        let offset = b0 - a0;
        match op {
            "<=" => rows.push(HalfSpace::new(normal, offset)),
            ">=" => rows.push(HalfSpace::new(normal.iter().map(|v| -v).collect(), -offset)),
            _ => {
                rows.push(HalfSpace::new(normal.clone(), offset));
                rows.push(HalfSpace::new(normal.iter().map(|v| -v).collect(), -offset));
            }
        }
    }
    Ok(Polyhedron::new(dim, rows)?)
}

/// Coefficients and constant of a linear expression such as `2*y1 - y2 + 3`.
fn linear(expr: &str, dim: usize) -> Result<(Vec<f64>, f64)> {
    let mut coeffs = vec![0.0; dim];
    let mut constant = 0.0;
    let compact: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        bail!("empty side in constraint");
    }
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        // split on + and - that are not part of an exponent
        if i > start && (c == '+' || c == '-') && !compact[..i].ends_with(['e', 'E']) {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    for term in terms {
        let (sign, body) = match term.strip_prefix('-') {
            Some(b) => (-1.0, b),
            None => (1.0, term.strip_prefix('+').unwrap_or(term)),
        };
        let var_at = body.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E');
        match var_at {
            None => constant += sign * number(body)?,
            Some(i) => {
                let coef = match body[..i].trim_end_matches('*') {
                    "" => 1.0,
                    c => number(c)?,
                };
                let name = &body[i..];
                let digits = name.trim_start_matches(|c: char| c.is_ascii_alphabetic());
                let index: usize = if digits.is_empty() {
                    1
                } else {
                    digits.parse().map_err(|_| anyhow!("bad variable {name:?}"))?
                };
                if index == 0 || index > dim {
                    bail!("variable {name:?} out of range for dimension {dim}");
                }
                coeffs[index - 1] += sign * coef;
            }
        }
    }
    Ok((coeffs, constant))
}
