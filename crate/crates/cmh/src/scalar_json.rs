//! Scalars on the wire: exact values as `"a/b"` strings, floats as JSON
//! numbers.

use cmh_core::scalar::{format_rational, parse_rational, Rational, Scalar};
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub trait JsonScalar: Scalar {
    fn to_json(&self) -> Value;
    /// Parses a command-line value.
    fn parse_flag(text: &str) -> Option<Self>;
}

impl JsonScalar for Rational {
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }

    fn parse_flag(text: &str) -> Option<Self> {
        parse_rational(text)
    }
}

impl JsonScalar for f64 {
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self).map_or(Value::Null, Value::Number)
    }

    fn parse_flag(text: &str) -> Option<Self> {
        let text = text.trim();
        if text.contains('/') {
            return parse_rational(text).map(|q| q.to_f64());
        }
        text.parse::<f64>().ok().filter(|x| x.is_finite())
    }
}

pub fn vec_json<S: JsonScalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(JsonScalar::to_json).collect())
}

pub fn matrix_json<S: JsonScalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|row| vec_json(row)).collect())
}

/// 1-based node lists.
pub fn classes_json(classes: &[Vec<usize>]) -> Value {
    Value::Array(classes.iter().map(|c| nodes_json(c)).collect())
}

pub fn nodes_json(nodes: &[usize]) -> Value {
    Value::Array(nodes.iter().map(|i| Value::from(i + 1)).collect())
}

/// Comma-separated vector; a single value is broadcast to length `n`.
pub fn parse_vector<S: JsonScalar>(text: &str, n: usize, flag: &str) -> CliResult<Vec<S>> {
    let parts: Vec<&str> = text.split(',').collect();
    let values = parts
        .iter()
        .map(|p| S::parse_flag(p).ok_or_else(|| CliError::Invalid(format!("--{flag}: cannot parse {p:?}"))))
        .collect::<CliResult<Vec<S>>>()?;
    match values.len() {
        1 => Ok(vec![values[0].clone(); n]),
        k if k == n => Ok(values),
        k => Err(CliError::Invalid(format!("--{flag}: expected {n} values, found {k}"))),
    }
}

pub fn parse_scalar<S: JsonScalar>(text: &str, flag: &str) -> CliResult<S> {
    S::parse_flag(text).ok_or_else(|| CliError::Invalid(format!("--{flag}: cannot parse {text:?}")))
}
