#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_embdebias"))
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture(name: &str) -> String {
    fixture_dir().join(name).display().to_string()
}

pub fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file"))
        .expect("schema parses")
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "expected success, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

pub fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("report file"))
        .expect("report parses")
}

/// Minimal JSON Schema checker covering the subset the bundled schema
/// uses: type, enum, required, properties, additionalProperties (boolean
/// or schema), items, oneOf, $ref into #/definitions, numeric bounds, and
/// string length bounds. Returns the first violation found.
pub fn validate(schema: &Value, root: &Value, v: &Value) -> Result<(), String> {
    if let Some(r) = schema.get("$ref") {
        let target = resolve_ref(root, r.as_str().ok_or("non-string $ref")?)?;
        return validate(target, root, v);
    }
    if let Some(branches) = schema.get("oneOf") {
        let arr = branches.as_array().ok_or("oneOf is not an array")?;
        let hits = arr.iter().filter(|s| validate(s, root, v).is_ok()).count();
        return match hits {
            1 => Ok(()),
            n => Err(format!("oneOf matched {n} branches")),
        };
    }
    if let Some(options) = schema.get("enum") {
        let arr = options.as_array().ok_or("enum is not an array")?;
        return if arr.contains(v) {
            Ok(())
        } else {
            Err(format!("{v} not in enum {options}"))
        };
    }
    if let Some(t) = schema.get("type") {
        check_type(t.as_str().ok_or("non-string type")?, v)?;
    }
    if let Some(n) = v.as_f64() {
        if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
            if n < min {
                return Err(format!("{n} below minimum {min}"));
            }
        }
        if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
            if n > max {
                return Err(format!("{n} above maximum {max}"));
            }
        }
    }
    if let Some(s) = v.as_str() {
        if let Some(min) = schema.get("minLength").and_then(Value::as_u64) {
            if (s.chars().count() as u64) < min {
                return Err(format!("{s:?} shorter than {min}"));
            }
        }
        if let Some(max) = schema.get("maxLength").and_then(Value::as_u64) {
            if (s.chars().count() as u64) > max {
                return Err(format!("{s:?} longer than {max}"));
            }
        }
    }
    if let Some(obj) = v.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().ok_or("non-string required key")?;
                if !obj.contains_key(key) {
                    return Err(format!("missing required key {key:?}"));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        if let Some(props) = props {
            for (key, sub) in props {
                if let Some(val) = obj.get(key) {
                    validate(sub, root, val).map_err(|e| format!("{key}: {e}"))?;
                }
            }
        }
        match schema.get("additionalProperties") {
            Some(Value::Bool(false)) => {
                for key in obj.keys() {
                    if !props.is_some_and(|p| p.contains_key(key)) {
                        return Err(format!("unexpected key {key:?}"));
                    }
                }
            }
            Some(Value::Bool(true)) | None => {}
            Some(sub) => {
                for (key, val) in obj {
                    if !props.is_some_and(|p| p.contains_key(key)) {
                        validate(sub, root, val).map_err(|e| format!("{key}: {e}"))?;
                    }
                }
            }
        }
    }
    if let Some(arr) = v.as_array() {
        if let Some(items) = schema.get("items") {
            for (i, item) in arr.iter().enumerate() {
                validate(items, root, item).map_err(|e| format!("[{i}]: {e}"))?;
            }
        }
    }
    Ok(())
}

fn check_type(name: &str, v: &Value) -> Result<(), String> {
    let ok = match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.as_i64().is_some() || v.as_u64().is_some(),
        other => return Err(format!("unsupported type name {other:?}")),
    };
    if ok {
        Ok(())
    } else {
        Err(format!("expected {name}, got {v}"))
    }
}

fn resolve_ref<'a>(root: &'a Value, path: &str) -> Result<&'a Value, String> {
    let rest = path
        .strip_prefix("#/")
        .ok_or_else(|| format!("unsupported $ref {path:?}"))?;
    let mut cur = root;
    for step in rest.split('/') {
        cur = cur
            .get(step)
            .ok_or_else(|| format!("$ref {path:?}: no member {step:?}"))?;
    }
    Ok(cur)
}
