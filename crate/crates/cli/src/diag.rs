//! Single-line JSON diagnostics on stderr.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::error::CliError;

fn emit(v: Value) {
    eprintln!("{v}");
}

fn error_fields(e: &CliError) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("kind".into(), json!(e.kind()));
    if let Some(core) = e.core() {
        if let Some(stage) = core.stage() {
            m.insert("stage".into(), json!(stage));
        }
        if let Some(at) = core.location() {
            m.insert("at".into(), json!(at));
        }
    }
    m.insert("message".into(), json!(e.to_string()));
    m
}

/// A failure that ends the command.
pub fn error(e: &CliError) {
    let mut m = Map::new();
    m.insert("level".into(), json!("error"));
    m.extend(error_fields(e));
    emit(Value::Object(m));
}

/// A failure confined to one input; the batch carries on.
pub fn item_error(item: &Path, e: &CliError) {
    let mut m = Map::new();
    m.insert("level".into(), json!("error"));
    m.insert("input".into(), json!(item.display().to_string()));
    m.extend(error_fields(e));
    emit(Value::Object(m));
}

pub fn warning(item: &Path, kind: &str, message: &str) {
    emit(json!({
        "level": "warning",
        "input": item.display().to_string(),
        "kind": kind,
        "message": message,
    }));
}
