//! Parameter input: inline JSON, a JSON file, or a registry id.

use std::fs;
use std::path::Path;

use radext::family::ExtremalParams;
use radext::profile::registry::lookup_example;
use radext::ratlaurent::{parse_rational, ParseRationalError, Rational};
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error("field {field}: floating-point literal {literal} refused; write rationals as \"p/q\" strings")]
    FloatLiteralRefused { field: String, literal: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Registry(String),
}

fn field_error(field: &str, message: impl Into<String>) -> ParseError {
    ParseError::Field {
        field: field.to_owned(),
        message: message.into(),
    }
}

const FIELDS: [&str; 5] = ["n", "A", "B", "C", "D"];

fn rational_field(obj: &Map<String, Value>, field: &str) -> Result<Rational, ParseError> {
    match obj.get(field) {
        None => Err(field_error(field, "missing")),
        Some(Value::String(text)) => parse_rational(text).map_err(|e| match e {
            ParseRationalError::FloatLiteral(literal) => ParseError::FloatLiteralRefused {
                field: field.to_owned(),
                literal,
            },
            other => field_error(field, other.to_string()),
        }),
        Some(Value::Number(num)) => match num.as_i64() {
            Some(v) => Ok(Rational::from_integer(v.into())),
            None => Err(ParseError::FloatLiteralRefused {
                field: field.to_owned(),
                literal: num.to_string(),
            }),
        },
        Some(other) => Err(field_error(field, format!("expected a \"p/q\" string, got {other}"))),
    }
}

/// Parses a parameter object `{"n":…, "A":"p/q", …}`.
///
/// Integer JSON numbers are accepted for convenience; any number with a
/// fractional part or exponent is refused.
pub fn parse_params_json(text: &str) -> Result<ExtremalParams, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
    let Value::Object(obj) = value else {
        return Err(ParseError::Json("expected an object".into()));
    };
    if let Some(extra) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(field_error(extra, "unknown field"));
    }
    let n = match obj.get("n") {
        None => return Err(field_error("n", "missing")),
        Some(Value::Number(num)) if num.is_u64() => num.as_u64().expect("checked"),
        Some(Value::Number(num)) if num.is_f64() => {
            return Err(ParseError::FloatLiteralRefused {
                field: "n".into(),
                literal: num.to_string(),
            })
        }
        Some(other) => return Err(field_error("n", format!("expected a positive integer, got {other}"))),
    };
    let n = u32::try_from(n).map_err(|_| field_error("n", "too large"))?;
    let [a, b, c, d] = ["A", "B", "C", "D"].map(|f| rational_field(&obj, f));
    ExtremalParams::new(n, a?, b?, c?, d?).map_err(|e| field_error("n", e.to_string()))
}

/// Where the parameters come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamsSource {
    Inline(String),
    File(String),
    Example(String),
}

impl ParamsSource {
    /// A `--params` value is inline JSON when it starts with `{`, else a path.
    pub fn from_flag(text: &str) -> Self {
        if text.trim_start().starts_with('{') {
            ParamsSource::Inline(text.to_owned())
        } else {
            ParamsSource::File(text.to_owned())
        }
    }
}

pub fn parse_params(source: &ParamsSource) -> Result<ExtremalParams, ParseError> {
    match source {
        ParamsSource::Inline(text) => parse_params_json(text),
        ParamsSource::File(path) => {
            let text = fs::read_to_string(Path::new(path)).map_err(|e| ParseError::Io {
                path: path.clone(),
                message: e.to_string(),
            })?;
            parse_params_json(&text)
        }
        ParamsSource::Example(id) => lookup_example(id)
            .map(|e| e.params)
            .map_err(|e| ParseError::Registry(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use radext::ratlaurent::{int, rat};

    #[test]
    fn parses_documented_examples() {
        let p = parse_params_json(r#"{"n":2,"A":"4/3","B":"0","C":"-1/3","D":"0"}"#).unwrap();
        assert_eq!(p, ExtremalParams::new(2, rat(4, 3), int(0), rat(-1, 3), int(0)).unwrap());
        let p = parse_params_json(r#"{"n":2,"A":"0","B":"1","C":"0","D":"0"}"#).unwrap();
        assert_eq!(p.b, int(1));
        assert_eq!(p, lookup_example("burns-simanca").unwrap().params);
    }

    #[test]
    fn refuses_floats() {
        for text in [
            r#"{"n":2,"A":"0.5","B":"0","C":"0","D":"0"}"#,
            r#"{"n":2,"A":0.5,"B":"0","C":"0","D":"0"}"#,
            r#"{"n":2,"A":"0","B":"1e2","C":"0","D":"0"}"#,
            r#"{"n":2.0,"A":"0","B":"0","C":"0","D":"0"}"#,
        ] {
            assert!(matches!(parse_params_json(text), Err(ParseError::FloatLiteralRefused { .. })), "{text}");
        }
    }

    #[test]
    fn field_level_errors() {
        let err = parse_params_json(r#"{"n":2,"A":"0","B":"0","C":"0"}"#).unwrap_err();
        assert_eq!(err, field_error("D", "missing"));
        let err = parse_params_json(r#"{"n":2,"A":"x","B":"0","C":"0","D":"0"}"#).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "A"));
        let err = parse_params_json(r#"{"n":0,"A":"0","B":"0","C":"0","D":"0"}"#).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "n"));
        let err = parse_params_json(r#"{"n":2,"A":"0","B":"0","C":"0","D":"0","E":"1"}"#).unwrap_err();
        assert!(matches!(err, ParseError::Field { ref field, .. } if field == "E"));
        assert_eq!(parse_params_json(r#"{"n":3,"A":2,"B":"0","C":"0","D":"-1"}"#).unwrap().a, int(2));
    }
}
