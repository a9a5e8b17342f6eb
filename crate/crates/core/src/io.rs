//! Input formats.
//!
//! Sequences: a JSON array of numbers (or `"a/b"` strings), or text with one
//! value per line. Step functions:
//! `{"segments": [{"len": 1, "val": "1/2"}, ...]}`.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::continuous::{Segment, StepFunction};
use crate::discrete::Sequence;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn literal<S: Scalar>(v: &Value) -> Result<S> {
    match v {
        Value::Number(n) => S::parse_literal(&n.to_string()),
        Value::String(s) => S::parse_literal(s),
        other => Err(Error::Parse(format!("expected a number, got {other}"))),
    }
}

pub fn parse_sequence<S: Scalar>(text: &str) -> Result<Sequence<S>> {
    let trimmed = text.trim_start();
    let values: Vec<S> = if trimmed.starts_with('[') {
        let json: Value = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
        let items = json
            .as_array()
            .ok_or_else(|| Error::Parse("expected a JSON array".into()))?;
        items.iter().map(literal).collect::<Result<_>>()?
    } else {
        text.lines()
            .map(|l| l.trim().trim_end_matches(','))
            .filter(|l| !l.is_empty())
            .map(S::parse_literal)
            .collect::<Result<_>>()?
    };
    Sequence::new(values)
}

pub fn parse_step_function<S: Scalar>(text: &str) -> Result<StepFunction<S>> {
    let json: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let segs = json
        .get("segments")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("expected an object with a \"segments\" array".into()))?;
    let segments = segs
        .iter()
        .map(|s| {
            let field = |name: &str| {
                s.get(name)
                    .ok_or_else(|| Error::Parse(format!("segment is missing \"{name}\"")))
                    .and_then(literal)
            };
            Ok(Segment {
                len: field("len")?,
                val: field("val")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    StepFunction::new(segments)
}

pub fn step_function_to_json<S: Scalar>(f: &StepFunction<S>) -> Value {
    let segments: Vec<Value> = f
        .segments()
        .iter()
        .map(|s| serde_json::json!({ "len": s.len.to_json(), "val": s.val.to_json() }))
        .collect();
    serde_json::json!({ "segments": segments })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_sequence<S: Scalar>(path: &Path) -> Result<Sequence<S>> {
    parse_sequence(&read(path)?)
}

pub fn read_step_function<S: Scalar>(path: &Path) -> Result<StepFunction<S>> {
    parse_step_function(&read(path)?)
}
