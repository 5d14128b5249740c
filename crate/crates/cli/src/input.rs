//! Job input files: a totally real field plus optional units or matrices.

use std::fs;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{Map, Value};
use thiserror::Error;
use torus_obstruct::exactpoly::IntPoly;
use torus_obstruct::intmatrix::SqIntMatrix;
use torus_obstruct::recipes::{decode_ints, decode_matrix, RecipeError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error: {0}")]
    SchemaError(String),
    #[error("integer of magnitude at least 2^53 must be encoded as a decimal string")]
    IntegerOverflowEncoding,
}

impl From<RecipeError> for InputError {
    fn from(e: RecipeError) -> Self {
        match e {
            RecipeError::IntegerOverflowEncoding => InputError::IntegerOverflowEncoding,
            other => InputError::SchemaError(other.to_string()),
        }
    }
}

/// Units of `Z[α]` as coefficient vectors, or explicit integer matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Generators {
    Units([Vec<BigInt>; 2]),
    Matrices([SqIntMatrix; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputSpec {
    pub field: IntPoly,
    pub generators: Option<Generators>,
}

/// Reads a file as UTF-8 JSON.
pub fn read_json(path: &Path) -> Result<Value, InputError> {
    let text = fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_json(&text)
}

pub fn parse_json(text: &str) -> Result<Value, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_input_file(path: &Path) -> Result<InputSpec, InputError> {
    parse_input_value(&read_json(path)?)
}

pub fn parse_input_value(v: &Value) -> Result<InputSpec, InputError> {
    let obj = v
        .as_object()
        .ok_or_else(|| InputError::SchemaError("top level must be an object".into()))?;
    for key in obj.keys() {
        if !["field", "units", "matrices"].contains(&key.as_str()) {
            return Err(InputError::SchemaError(format!("unknown key {key:?}")));
        }
    }
    let field = obj
        .get("field")
        .ok_or_else(|| InputError::SchemaError("missing key \"field\"".into()))?;
    let field = object(field, "field")?;
    let poly = field
        .get("poly")
        .ok_or_else(|| InputError::SchemaError("missing key \"field.poly\"".into()))?;
    let field = IntPoly::new(decode_ints(poly)?);
    let generators = match (obj.get("units"), obj.get("matrices")) {
        (Some(_), Some(_)) => {
            return Err(InputError::SchemaError(
                "\"units\" and \"matrices\" are mutually exclusive".into(),
            ))
        }
        (Some(u), None) => {
            let u = object(u, "units")?;
            Some(Generators::Units([
                decode_ints(member(u, "units", "u1")?)?,
                decode_ints(member(u, "units", "u2")?)?,
            ]))
        }
        (None, Some(m)) => {
            let m = object(m, "matrices")?;
            Some(Generators::Matrices([
                decode_matrix(member(m, "matrices", "a1")?)?,
                decode_matrix(member(m, "matrices", "a2")?)?,
            ]))
        }
        (None, None) => None,
    };
    Ok(InputSpec { field, generators })
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>, InputError> {
    v.as_object()
        .ok_or_else(|| InputError::SchemaError(format!("\"{what}\" must be an object")))
}

fn member<'a>(
    obj: &'a Map<String, Value>,
    parent: &str,
    key: &str,
) -> Result<&'a Value, InputError> {
    obj.get(key)
        .ok_or_else(|| InputError::SchemaError(format!("missing key \"{parent}.{key}\"")))
}
