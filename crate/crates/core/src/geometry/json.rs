//! Set-specification JSON.
//!
//! A set is one of
//!
//! ```text
//! {"box": {"lo": [...], "hi": [...]}}
//! {"polyhedron": {"C": [[...], ...], "d": [...], "dim": n}}
//! {"halfspace": {"c": [...], "d": x}}
//! {"union": [set, ...], "dim": n}
//! ```
//!
//! Infinite endpoints are the strings `"inf"` and `"-inf"`. The `"dim"` keys
//! are optional and only needed when no constraint fixes the dimension (the
//! whole space, the empty union). Emitted numbers carry 17 significant
//! digits, so documents round-trip bit-exactly.

use std::fmt::Write as _;

use serde_json::Value;

use super::{HalfSpace, Hyperbox, PolyUnion, Polyhedron};
use crate::error::{Error, Result};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSet(msg.into())
}

/// Reads an extended real: a JSON number or one of the infinity sentinels.
pub fn parse_number(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| invalid("number out of range")),
        Value::String(s) => match s.trim() {
            "inf" | "+inf" | "Inf" | "Infinity" => Ok(f64::INFINITY),
            "-inf" | "-Inf" | "-Infinity" => Ok(f64::NEG_INFINITY),
            other => other
                .parse::<f64>()
                .map_err(|_| invalid(format!("not a number: {other:?}"))),
        },
        other => Err(invalid(format!("expected a number, found {other}"))),
    }
}

pub fn parse_vector(v: &Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| invalid("expected an array of numbers"))?
        .iter()
        .map(parse_number)
        .collect()
}

fn parse_finite_vector(v: &Value) -> Result<Vec<f64>> {
    let out = parse_vector(v)?;
    if out.iter().any(|x| !x.is_finite()) {
        return Err(invalid("constraint coefficients must be finite"));
    }
    Ok(out)
}

fn parse_dim(obj: &serde_json::Map<String, Value>) -> Result<Option<usize>> {
    match obj.get("dim") {
        None => Ok(None),
        Some(v) => v
            .as_u64()
            .filter(|d| *d > 0)
            .map(|d| Some(d as usize))
            .ok_or_else(|| invalid("\"dim\" must be a positive integer")),
    }
}

/// Parses a box specification.
pub fn parse_box(v: &Value) -> Result<Hyperbox> {
    let inner = v
        .get("box")
        .ok_or_else(|| invalid("expected {\"box\": {...}}"))?;
    let lo = parse_vector(inner.get("lo").ok_or_else(|| invalid("box without \"lo\""))?)?;
    let hi = parse_vector(inner.get("hi").ok_or_else(|| invalid("box without \"hi\""))?)?;
    if lo.len() != hi.len() || lo.is_empty() {
        return Err(invalid("box \"lo\"/\"hi\" must be nonempty and of equal length"));
    }
    Hyperbox::new(lo, hi)
}

/// Parses any set specification into a union of polyhedra.
/// `expected_dim`, when known, resolves dimension-free documents.
pub fn parse_set(v: &Value, expected_dim: Option<usize>) -> Result<PolyUnion> {
    let obj = v
        .as_object()
        .ok_or_else(|| invalid("a set must be a JSON object"))?;
    let declared = parse_dim(obj)?;
    if let (Some(a), Some(b)) = (declared, expected_dim) {
        if a != b {
            return Err(Error::DimensionMismatch {
                expected: b,
                found: a,
            });
        }
    }
    let dim_hint = declared.or(expected_dim);

    let set = if obj.contains_key("box") {
        let b = parse_box(v)?;
        PolyUnion::from(b.to_polyhedron())
    } else if let Some(inner) = obj.get("halfspace") {
        let c = parse_finite_vector(inner.get("c").ok_or_else(|| invalid("halfspace without \"c\""))?)?;
        let d = parse_number(inner.get("d").ok_or_else(|| invalid("halfspace without \"d\""))?)?;
        if c.is_empty() {
            return Err(invalid("halfspace normal must be nonempty"));
        }
        let n = c.len();
        PolyUnion::from(Polyhedron::new(n, vec![HalfSpace::new(c, d)])?)
    } else if let Some(inner) = obj.get("polyhedron") {
        let inner_obj = inner
            .as_object()
            .ok_or_else(|| invalid("\"polyhedron\" must be an object"))?;
        let rows = inner_obj
            .get("C")
            .and_then(Value::as_array)
            .ok_or_else(|| invalid("polyhedron without \"C\""))?;
        let d = parse_vector(inner_obj.get("d").ok_or_else(|| invalid("polyhedron without \"d\""))?)?;
        let c: Vec<Vec<f64>> = rows.iter().map(parse_finite_vector).collect::<Result<_>>()?;
        if c.len() != d.len() {
            return Err(invalid("polyhedron \"C\" and \"d\" differ in length"));
        }
        let dim = match (c.first(), parse_dim(inner_obj)?.or(dim_hint)) {
            (Some(row), _) => row.len(),
            (None, Some(n)) => n,
            (None, None) => return Err(invalid("polyhedron without constraints needs \"dim\"")),
        };
        PolyUnion::from(Polyhedron::from_rows(dim, &c, &d)?)
    } else if let Some(inner) = obj.get("union") {
        let items = inner
            .as_array()
            .ok_or_else(|| invalid("\"union\" must be an array"))?;
        let mut parts = Vec::new();
        let mut dim = dim_hint;
        for item in items {
            let u = parse_set(item, dim)?;
            dim = Some(u.dim());
            parts.extend(u.into_parts());
        }
        let dim = dim.ok_or_else(|| invalid("empty union needs \"dim\""))?;
        PolyUnion::new(dim, parts)?
    } else {
        return Err(invalid(
            "expected one of \"box\", \"polyhedron\", \"halfspace\", \"union\"",
        ));
    };
    if let Some(n) = dim_hint {
        if set.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: set.dim(),
            });
        }
    }
    Ok(set)
}

pub fn parse_set_str(text: &str, expected_dim: Option<usize>) -> Result<PolyUnion> {
    parse_set(&serde_json::from_str(text)?, expected_dim)
}

pub fn parse_box_str(text: &str) -> Result<Hyperbox> {
    parse_box(&serde_json::from_str(text)?)
}

/// Formats an extended real as a JSON value with 17 significant digits
/// (the `%.17g` convention); infinities become the string sentinels.
pub fn number(v: f64) -> String {
    if v.is_nan() {
        return "\"nan\"".into();
    }
    if v == f64::INFINITY {
        return "\"inf\"".into();
    }
    if v == f64::NEG_INFINITY {
        return "\"-inf\"".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    if exp >= 0 {
        let point = exp as usize + 1;
        let (int_part, frac) = digits.split_at(point);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{}", digits.trim_end_matches('0'))
    }
}

pub fn vector(v: &[f64]) -> String {
    let mut s = String::from("[");
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&number(*x));
    }
    s.push(']');
    s
}

pub fn polyhedron_to_json(p: &Polyhedron) -> String {
    let mut s = String::from("{\"polyhedron\": {\"C\": [");
    for (i, c) in p.constraints().iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        s.push_str(&vector(&c.normal));
    }
    s.push_str("], \"d\": ");
    let d: Vec<f64> = p.constraints().iter().map(|c| c.offset).collect();
    s.push_str(&vector(&d));
    let _ = write!(s, ", \"dim\": {}}}}}", p.dim());
    s
}

pub fn box_to_json(b: &Hyperbox) -> String {
    format!(
        "{{\"box\": {{\"lo\": {}, \"hi\": {}}}}}",
        vector(&b.lo),
        vector(&b.hi)
    )
}

/// One part per line, so result files diff cleanly.
pub fn union_to_json(u: &PolyUnion) -> String {
    let mut s = format!("{{\n  \"dim\": {},\n  \"union\": [", u.dim());
    for (i, p) in u.parts().iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        s.push_str(&polyhedron_to_json(p));
    }
    if !u.is_empty() {
        s.push_str("\n  ");
    }
    s.push_str("]\n}\n");
    s
}
