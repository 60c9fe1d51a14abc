//! Provenance stamped into every report.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const TOOL: &str = "biclique";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of the JSON form of a command's arguments.
pub fn config_hash<T: Serialize>(args: &T) -> String {
    let bytes = serde_json::to_vec(args).expect("arguments serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `body` (a JSON object) with tool, version, seed and config hash added.
pub fn stamp<A: Serialize, B: Serialize>(args: &A, seed: Option<u64>, body: &B) -> CliResult<Value> {
    let mut out = Map::new();
    out.insert("tool".into(), TOOL.into());
    out.insert("version".into(), VERSION.into());
    out.insert("seed".into(), seed.into());
    out.insert("config_hash".into(), config_hash(args).into());
    match serde_json::to_value(body)? {
        Value::Object(fields) => {
            for (k, v) in fields {
                if !out.contains_key(&k) {
                    out.insert(k, v);
                }
            }
        }
        other => {
            out.insert("result".into(), other);
        }
    }
    Ok(Value::Object(out))
}

/// Pretty JSON with a trailing newline, to `path` or stdout.
pub fn emit(value: &Value, path: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
