//! JSON encodings of rings, elements, matrices, words and witnesses.
//!
//! Rings are constructor trees such as `{"kind":"mod","n":4}` or
//! `{"kind":"poly","base":{"kind":"int"},"var":"T"}`. Elements are
//! ring-relative: integers are JSON numbers (strings when they do not fit
//! in 64 bits), rationals are `"a/b"` strings and polynomials are arrays of
//! coefficients from degree 0 upward.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::matrices::Mat;
use crate::rings::{Descriptor, Elem, Ring, RingRef, DEFAULT_DEGREE_CAP};
use crate::words::{Family, GenWord, Generator, Witness};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| perr(format!("missing field {:?}", key)))
}

fn u64_field(v: &Value, key: &str) -> Result<u64> {
    field(v, key)?.as_u64().ok_or_else(|| perr(format!("{:?} must be a non-negative integer", key)))
}

pub fn ring_to_json(r: &Ring) -> Value {
    match r.descriptor() {
        Descriptor::Integers => json!({"kind": "int"}),
        Descriptor::Rationals => json!({"kind": "rat"}),
        Descriptor::Modular { n } => json!({"kind": "mod", "n": n}),
        Descriptor::PrimeField { p } => json!({"kind": "prime", "p": p}),
        Descriptor::TruncatedPoly { p, e } => json!({"kind": "trunc", "p": p, "e": e}),
        Descriptor::LocalizedIntegers { p } => json!({"kind": "loc_int", "p": p}),
        Descriptor::Poly { base, var, degree_cap } => {
            let mut m = json!({"kind": "poly", "base": ring_to_json(base), "var": var});
            if *degree_cap != DEFAULT_DEGREE_CAP {
                m["degree_cap"] = json!(degree_cap);
            }
            m
        }
        Descriptor::Quotient { base, gens } => json!({
            "kind": "quot",
            "base": ring_to_json(base),
            "gens": gens.iter().map(|g| elem_to_json(base, g)).collect::<Vec<_>>(),
        }),
        Descriptor::Fraction { base, s } => json!({
            "kind": "frac",
            "base": ring_to_json(base),
            "s": elem_to_json(base, s),
        }),
    }
}

pub fn ring_from_json(v: &Value) -> Result<RingRef> {
    if let Some(text) = v.as_str() {
        return parse_ring(text);
    }
    let kind = field(v, "kind")?.as_str().ok_or_else(|| perr("\"kind\" must be a string"))?;
    match kind {
        "int" => Ok(Ring::integers()),
        "rat" => Ok(Ring::rationals()),
        "mod" => Ring::modular(u64_field(v, "n")?),
        "prime" => Ring::prime_field(u64_field(v, "p")?),
        "trunc" => Ring::truncated_poly(u64_field(v, "p")?, u64_field(v, "e")? as u32),
        "loc_int" => Ring::localized_integers(u64_field(v, "p")?),
        "poly" => {
            let base = ring_from_json(field(v, "base")?)?;
            let var = v.get("var").and_then(Value::as_str).unwrap_or("T");
            let cap = v.get("degree_cap").and_then(Value::as_u64).map_or(DEFAULT_DEGREE_CAP, |c| c as usize);
            Ok(Ring::poly_with_cap(&base, var, cap))
        }
        "quot" => {
            let base = ring_from_json(field(v, "base")?)?;
            let gens = field(v, "gens")?
                .as_array()
                .ok_or_else(|| perr("\"gens\" must be an array"))?
                .iter()
                .map(|g| elem_from_json(&base, g))
                .collect::<Result<Vec<_>>>()?;
            Ring::quotient(&base, gens)
        }
        "frac" => {
            let base = ring_from_json(field(v, "base")?)?;
            let s = elem_from_json(&base, field(v, "s")?)?;
            Ring::fraction(&base, s)
        }
        other => Err(perr(format!("unknown ring kind {:?}", other))),
    }
}

/// Ring from CLI text: JSON, or shorthand `int`, `rat`, `mod:N`, `prime:P`,
/// `trunc:P:E` (alias `polyloc:P:E`, i.e. F_P[x]/(x^E)), `locint:P`,
/// `zfrac:S` (Z with S inverted), each optionally followed by `[T]` suffixes.
pub fn parse_ring(text: &str) -> Result<RingRef> {
    let t = text.trim();
    if t.starts_with('{') {
        let v: Value = serde_json::from_str(t).map_err(|e| perr(e.to_string()))?;
        return ring_from_json(&v);
    }
    let (head, vars) = match t.find('[') {
        Some(k) => (&t[..k], &t[k..]),
        None => (t, ""),
    };
    let parts: Vec<&str> = head.split(':').collect();
    let num = |k: usize| -> Result<u64> {
        parts.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| perr(format!("bad ring shorthand {:?}", text)))
    };
    let mut ring = match parts[0] {
        "int" | "Z" => Ring::integers(),
        "rat" | "Q" => Ring::rationals(),
        "mod" => Ring::modular(num(1)?)?,
        "prime" => Ring::prime_field(num(1)?)?,
        "trunc" | "polyloc" => Ring::truncated_poly(num(1)?, num(2)? as u32)?,
        "locint" => Ring::localized_integers(num(1)?)?,
        "zfrac" => {
            let s: i64 = parts.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| perr("zfrac:S needs an integer"))?;
            Ring::fraction(&Ring::integers(), Elem::int(s))?
        }
        _ => return Err(perr(format!("unknown ring shorthand {:?}", text))),
    };
    let mut rest = vars;
    while !rest.is_empty() {
        let close = rest.find(']').ok_or_else(|| perr("unclosed '['"))?;
        let var = &rest[1..close];
        if var.is_empty() || !rest.starts_with('[') {
            return Err(perr(format!("bad variable suffix in {:?}", text)));
        }
        ring = Ring::poly(&ring, var);
        rest = &rest[close + 1..];
    }
    Ok(ring)
}

fn int_json(a: &BigInt) -> Value {
    match a.to_i64() {
        Some(x) => json!(x),
        None => json!(a.to_string()),
    }
}

pub fn elem_to_json(r: &Ring, e: &Elem) -> Value {
    match e {
        Elem::Int(a) => int_json(a),
        Elem::Rat(q) if q.denom().is_one() => int_json(q.numer()),
        Elem::Rat(q) => json!(format!("{}/{}", q.numer(), q.denom())),
        Elem::Poly(c) => match r.poly_base() {
            Some(base) => Value::Array(c.iter().map(|x| elem_to_json(base, x)).collect()),
            None => Value::Array(c.iter().map(|x| elem_to_json(r, x)).collect()),
        },
    }
}

fn raw_elem(v: &Value) -> Result<Elem> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Elem::int)
            .ok_or_else(|| perr(format!("{} is not an integer; use \"a/b\" for fractions", n))),
        Value::String(s) => {
            let s = s.trim();
            if let Some((a, b)) = s.split_once('/') {
                let a: BigInt = a.trim().parse().map_err(|_| perr(format!("bad numerator in {:?}", s)))?;
                let b: BigInt = b.trim().parse().map_err(|_| perr(format!("bad denominator in {:?}", s)))?;
                if b == BigInt::from(0) {
                    return Err(perr("zero denominator"));
                }
                Ok(Elem::Rat(BigRational::new(a, b)))
            } else {
                s.parse().map(Elem::Int).map_err(|_| perr(format!("bad number {:?}", s)))
            }
        }
        Value::Array(a) => a.iter().map(raw_elem).collect::<Result<Vec<_>>>().map(Elem::Poly),
        other => Err(perr(format!("cannot read an element from {}", other))),
    }
}

pub fn elem_from_json(r: &Ring, v: &Value) -> Result<Elem> {
    r.normalize(raw_elem(v)?)
}

pub fn mat_to_json(m: &Mat) -> Value {
    let r = m.ring();
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "ring": ring_to_json(r),
        "entries": m.to_rows().iter().map(|row| row.iter().map(|e| elem_to_json(r, e)).collect::<Vec<_>>()).collect::<Vec<_>>(),
    })
}

/// Matrix from `{"rows","cols","ring","entries"}` or from a bare array of
/// rows with the ring supplied separately.
pub fn mat_from_json(v: &Value, ring: Option<&RingRef>) -> Result<Mat> {
    let (r, entries) = match v {
        Value::Object(_) => {
            let r = match v.get("ring") {
                Some(rv) => ring_from_json(rv)?,
                None => ring.cloned().ok_or_else(|| perr("matrix without a ring"))?,
            };
            (r, field(v, "entries")?)
        }
        Value::Array(_) => (ring.cloned().ok_or_else(|| perr("matrix without a ring"))?, v),
        _ => return Err(perr("a matrix is an object or an array of rows")),
    };
    if let Some(given) = ring {
        if *given != r {
            return Err(Error::DescriptorMismatch(format!("matrix over {} where {} was expected", r, given)));
        }
    }
    let rows = entries.as_array().ok_or_else(|| perr("\"entries\" must be an array"))?;
    let rows: Vec<Vec<Elem>> = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| perr("\"entries\" must be an array of rows"))?
                .iter()
                .map(|e| elem_from_json(&r, e))
                .collect()
        })
        .collect::<Result<_>>()?;
    let m = Mat::from_rows(&r, rows)?;
    if let (Some(nr), Some(nc)) = (v.get("rows").and_then(Value::as_u64), v.get("cols").and_then(Value::as_u64)) {
        if (m.rows(), m.cols()) != (nr as usize, nc as usize) {
            return Err(Error::ShapeMismatch(format!("declared {}x{}, found {}x{}", nr, nc, m.rows(), m.cols())));
        }
    }
    Ok(m)
}

/// A single row: a matrix object with one row, or a flat array of elements.
pub fn row_from_json(v: &Value, ring: &RingRef) -> Result<Mat> {
    let m = match v {
        Value::Array(items) => {
            let row = items.iter().map(|e| elem_from_json(ring, e)).collect::<Result<Vec<_>>>()?;
            Mat::from_rows(ring, vec![row])?
        }
        _ => mat_from_json(v, Some(ring))?,
    };
    if m.rows() != 1 {
        return Err(Error::ShapeMismatch("expected a single row".into()));
    }
    Ok(m)
}

pub fn word_to_json(w: &GenWord) -> Value {
    let r = w.ring();
    json!({
        "family": w.family().name(),
        "size": w.size(),
        "ring": ring_to_json(r),
        "gens": w.gens().iter().map(|g| json!({"i": g.i, "j": g.j, "param": elem_to_json(r, &g.param)})).collect::<Vec<_>>(),
    })
}

pub fn word_from_json(v: &Value, ring: Option<&RingRef>) -> Result<GenWord> {
    let r = match v.get("ring") {
        Some(rv) => ring_from_json(rv)?,
        None => ring.cloned().ok_or_else(|| perr("word without a ring"))?,
    };
    let family = Family::parse(field(v, "family")?.as_str().ok_or_else(|| perr("\"family\" must be a string"))?)?;
    let size = u64_field(v, "size")? as usize;
    let gens = field(v, "gens")?
        .as_array()
        .ok_or_else(|| perr("\"gens\" must be an array"))?
        .iter()
        .map(|g| {
            Ok(Generator::new(
                u64_field(g, "i")? as usize,
                u64_field(g, "j")? as usize,
                elem_from_json(&r, field(g, "param")?)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    GenWord::new(&r, size, family, gens)
}

pub fn witness_to_json(w: &Witness) -> Value {
    let mut matrices = Map::new();
    for (k, m) in &w.matrices {
        matrices.insert(k.clone(), mat_to_json(m));
    }
    let mut words = Map::new();
    for (k, x) in &w.words {
        words.insert(k.clone(), word_to_json(x));
    }
    let mut notes = Map::new();
    for (k, x) in &w.notes {
        notes.insert(k.clone(), json!(x));
    }
    json!({
        "claim": w.claim.name(),
        "verified": w.checks.iter().all(|c| c.passed),
        "checks": w.checks.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
        "matrices": matrices,
        "words": words,
        "notes": notes,
    })
}

pub fn error_to_json(e: &Error, context: Value) -> Value {
    json!({"code": e.code(), "message": e.to_string(), "context": context})
}
