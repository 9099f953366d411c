//! JSON encoding of elements:
//! `{"m","n","p","r","basis","terms":[{"a":[..],"b":[..],"c":int}]}` with
//! terms in lexicographic label order and every `c` in `[1, p)`.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::torus::{Basis, ExponentVector, TorusElement, TorusSpec};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermJson {
    a: Vec<u32>,
    b: Vec<u32>,
    c: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementJson {
    m: usize,
    n: usize,
    p: u64,
    r: u32,
    basis: Basis,
    terms: Vec<TermJson>,
}

fn encode(f: &TorusElement) -> ElementJson {
    let s = f.spec();
    ElementJson {
        m: s.m(),
        n: s.n(),
        p: s.p().as_u64(),
        r: s.r(),
        basis: f.basis(),
        terms: f.terms().map(|(ev, c)| TermJson { a: ev.a, b: ev.b, c: i64::from(c.value()) }).collect(),
    }
}

fn decode(e: ElementJson, cap: u64) -> Result<TorusElement> {
    let spec = TorusSpec::with_cap(e.m, e.n, e.p, e.r, cap)?;
    let mut seen = BTreeSet::new();
    let mut terms = Vec::with_capacity(e.terms.len());
    for t in e.terms {
        let ev = ExponentVector::new(t.a, t.b);
        spec.validate(&ev)?;
        if t.c < 1 || t.c >= e.p as i64 {
            return Err(Error::Parse(format!("coefficient {} at {ev} is not in [1, {})", t.c, e.p)));
        }
        if !seen.insert(ev.clone()) {
            return Err(Error::Parse(format!("duplicate term {ev}")));
        }
        terms.push((ev, t.c));
    }
    TorusElement::from_terms(&spec, e.basis, terms)
}

pub fn element_to_value(f: &TorusElement) -> Value {
    serde_json::to_value(encode(f)).expect("element encodes")
}

pub fn element_to_json(f: &TorusElement) -> String {
    serde_json::to_string_pretty(&encode(f)).expect("element encodes")
}

pub fn elements_to_json(fs: &[TorusElement]) -> String {
    let all: Vec<ElementJson> = fs.iter().map(encode).collect();
    serde_json::to_string_pretty(&all).expect("elements encode")
}

/// Parses one element; the spec must fit under `cap` labels.
pub fn element_from_json(text: &str, cap: u64) -> Result<TorusElement> {
    let e: ElementJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    decode(e, cap)
}

/// Parses either a single element or an array of elements.
pub fn elements_from_json(text: &str, cap: u64) -> Result<Vec<TorusElement>> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let items = match v {
        Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|item| {
            let e: ElementJson = serde_json::from_value(item).map_err(|e| Error::Parse(e.to_string()))?;
            decode(e, cap)
        })
        .collect()
}

/// A big integer as a JSON number when it fits in `u64`, else as a string.
pub fn big_to_value(v: &BigUint) -> Value {
    match u64::try_from(v) {
        Ok(small) => Value::from(small),
        Err(_) => Value::from(v.to_string()),
    }
}

pub fn serialize_big<S: Serializer>(v: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    big_to_value(v).serialize(s)
}
