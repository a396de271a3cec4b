//! Optional JSON config file; command-line flags take precedence.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

pub type Config = Map<String, Value>;

pub fn load(path: &Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err("config file must hold a JSON object".into()),
        Err(e) => Err(format!("bad config JSON: {e}")),
    }
}

fn lookup<'a>(cfg: &'a Config, key: &str) -> Option<&'a Value> {
    cfg.get(key).or_else(|| cfg.get(&key.replace('_', "-")))
}

/// Numbers are accepted where strings are expected (`"z": -1`).
fn coerce<T: DeserializeOwned>(v: &Value) -> Option<T> {
    serde_json::from_value(v.clone()).ok().or_else(|| match v {
        Value::Number(n) => serde_json::from_value(Value::String(n.to_string())).ok(),
        Value::Array(items) => {
            let strings: Vec<Value> = items
                .iter()
                .map(|i| match i {
                    Value::Number(n) => Value::String(n.to_string()),
                    other => other.clone(),
                })
                .collect();
            serde_json::from_value(Value::Array(strings)).ok()
        }
        _ => None,
    })
}

pub fn merge<T: DeserializeOwned + PartialEq>(
    slot: &mut Option<T>,
    cfg: &Config,
    key: &str,
    warnings: &mut Vec<String>,
) -> Result<(), String> {
    let Some(v) = lookup(cfg, key) else { return Ok(()) };
    let parsed: T = coerce(v).ok_or_else(|| format!("config key {key:?} has the wrong type"))?;
    match slot {
        Some(current) if *current != parsed => {
            warnings.push(format!("--{} overrides the config file value", key.replace('_', "-")));
        }
        Some(_) => {}
        None => *slot = Some(parsed),
    }
    Ok(())
}

pub fn merge_flag(slot: &mut bool, cfg: &Config, key: &str) -> Result<(), String> {
    if let Some(v) = lookup(cfg, key) {
        *slot |= v.as_bool().ok_or_else(|| format!("config key {key:?} must be a boolean"))?;
    }
    Ok(())
}
