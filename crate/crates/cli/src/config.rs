//! JSON configuration loading.
//!
//! Numbers may be written as decimal strings (`"master_seed": "18446744073709551615"`);
//! they are turned into JSON numbers before deserialization. The digest is the
//! SHA-256 of the normalized document serialized with sorted keys, so key
//! order in the file does not matter.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(normalize_numbers(value))
}

fn parse_number(s: &str) -> Option<Number> {
    let t = s.trim();
    if let Ok(u) = t.parse::<u64>() {
        return Some(u.into());
    }
    if let Ok(i) = t.parse::<i64>() {
        return Some(i.into());
    }
    // only plain decimal literals, not "inf" or "nan"
    let looks_numeric = !t.is_empty()
        && t
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        && t.chars().any(|c| c.is_ascii_digit());
    if looks_numeric {
        t.parse::<f64>().ok().and_then(Number::from_f64)
    } else {
        None
    }
}

/// Replaces numeric strings by numbers, recursively.
pub fn normalize_numbers(value: Value) -> Value {
    match value {
        Value::String(s) => match parse_number(&s) {
            Some(n) => Value::Number(n),
            None => Value::String(s),
        },
        Value::Array(items) => Value::Array(items.into_iter().map(normalize_numbers).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, normalize_numbers(v)))
                .collect(),
        ),
        other => other,
    }
}

/// Sorted-key compact serialization.
pub fn canonical_string(value: &Value) -> String {
    // serde_json's default map is ordered by key
    serde_json::to_string(value).expect("values always serialize")
}

pub fn digest(value: &Value) -> String {
    hex::encode(Sha256::digest(canonical_string(value).as_bytes()))
}

const VALIDATION_PREFIXES: [&str; 3] = [
    "invalid parameter",
    "markov chain is reducible",
    "coefficients fail summability",
];

/// Deserializes a normalized document; failures of domain validation map to
/// [`CliError::Validation`], structural problems to [`CliError::Parse`].
pub fn from_value<T: DeserializeOwned>(value: Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(value).map_err(|e| {
        let message = e.to_string();
        if VALIDATION_PREFIXES.iter().any(|p| message.starts_with(p)) {
            CliError::Validation(message)
        } else {
            CliError::Parse {
                path: path.to_path_buf(),
                message,
            }
        }
    })
}
