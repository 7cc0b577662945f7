//! Parsing of vector specs: inline JSON, `@file` references and the
//! semicolon lists used in CSV batch files.

use std::fs;

use maj_lattice::{
    canonicalize, parse_rational, rational_from_f64, CanonOptions, Error, ProbVector, Rational,
    Scalar,
};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseOptions {
    pub exact: bool,
    pub epsilon: f64,
}

/// A vector whose arithmetic backend is chosen at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyVector {
    Exact(ProbVector<Rational>),
    Float(ProbVector<f64>),
}

/// Two vectors sharing a backend.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorPair {
    Exact(ProbVector<Rational>, ProbVector<Rational>),
    Float(ProbVector<f64>, ProbVector<f64>),
}

impl VectorPair {
    pub fn new(p: AnyVector, q: AnyVector) -> Result<Self, Error> {
        match (p, q) {
            (AnyVector::Exact(p), AnyVector::Exact(q)) => Ok(VectorPair::Exact(p, q)),
            (AnyVector::Float(p), AnyVector::Float(q)) => Ok(VectorPair::Float(p, q)),
            _ => Err(Error::ModeMismatch),
        }
    }

    /// Zero-pads the shorter vector to the common dimension.
    pub fn padded(self) -> Result<Self, Error> {
        Ok(match self {
            VectorPair::Exact(p, q) => {
                let n = p.dim().max(q.dim());
                VectorPair::Exact(p.zero_padded(n)?, q.zero_padded(n)?)
            }
            VectorPair::Float(p, q) => {
                let n = p.dim().max(q.dim());
                VectorPair::Float(p.zero_padded(n)?, q.zero_padded(n)?)
            }
        })
    }
}

/// Parses an inline JSON spec or, with a leading `@`, the JSON in a file.
pub fn parse_spec(text: &str, opts: ParseOptions) -> Result<AnyVector, CliError> {
    let text = text.trim();
    let body = match text.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {path}: {e}")))?,
        None => text.to_string(),
    };
    let value: Value = serde_json::from_str(&body)
        .map_err(|e| Error::Parse(format!("vector spec is not valid JSON: {e}")))?;
    Ok(parse_value(&value, opts)?)
}

/// Accepts `[w, ...]` with numeric or string weights, or
/// `{"weights": [...], "mode": "exact" | "float"}`.
pub fn parse_value(value: &Value, opts: ParseOptions) -> Result<AnyVector, Error> {
    match value {
        Value::Array(items) => build(items, opts.exact, opts.epsilon),
        Value::Object(map) => {
            let Some(Value::Array(items)) = map.get("weights") else {
                return Err(Error::Parse("object spec needs a \"weights\" array".into()));
            };
            let exact = match map.get("mode") {
                None => opts.exact,
                Some(Value::String(m)) if m == "exact" => true,
                Some(Value::String(m)) if m == "float" => false,
                Some(other) => return Err(Error::Parse(format!("unknown mode {other}"))),
            };
            build(items, exact, opts.epsilon)
        }
        Value::String(s) => parse_list(s, opts),
        other => Err(Error::Parse(format!(
            "expected an array of weights, found {other}"
        ))),
    }
}

/// Semicolon- or comma-separated weights, e.g. `0.7;0.15;0.15`.
pub fn parse_list(text: &str, opts: ParseOptions) -> Result<AnyVector, Error> {
    let items: Vec<Value> = text
        .split([';', ','])
        .map(|t| Value::String(t.trim().to_string()))
        .collect();
    build(&items, opts.exact, opts.epsilon)
}

fn build(items: &[Value], exact: bool, epsilon: f64) -> Result<AnyVector, Error> {
    if exact {
        let raw = items
            .iter()
            .map(exact_weight)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnyVector::Exact(canonicalize(
            raw,
            CanonOptions::default(),
        )?))
    } else {
        let raw = items
            .iter()
            .map(float_weight)
            .collect::<Result<Vec<_>, _>>()?;
        let opts = CanonOptions {
            epsilon,
            ..CanonOptions::default()
        };
        Ok(AnyVector::Float(canonicalize(raw, opts)?))
    }
}

fn exact_weight(v: &Value) -> Result<Rational, Error> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            let f = n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("weight {n} is not representable")))?;
            rational_from_f64(f)
        }
        other => Err(Error::Parse(format!("weight {other} is not a number"))),
    }
}

fn float_weight(v: &Value) -> Result<f64, Error> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .ok_or_else(|| Error::Parse(format!("weight {n} is not representable"))),
        Value::String(s) => {
            let s = s.trim();
            if s.contains('/') {
                return parse_rational(s).map(|r| r.to_f64());
            }
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: {s:?}")))
        }
        other => Err(Error::Parse(format!("weight {other} is not a number"))),
    }
}
