//! Experiment configuration: flat `key = value` files (`#` starts a
//! comment), the `config` object of a previous run's manifest, and command
//! flags, merged in that order of increasing priority.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Number, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Float,
    Int,
    Str,
    Bool,
}

/// A recognised key with its type and default.
#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Option<&'static str>,
}

pub const fn key(name: &'static str, kind: Kind, default: Option<&'static str>) -> Key {
    Key { name, kind, default }
}

/// Keys shared by every command.
pub const COMMON: [Key; 2] = [
    key("seed", Kind::Int, Some("42")),
    key("output_dir", Kind::Str, Some("lamperti-out")),
];

/// Raw key/value pairs read from a config file.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    pub command: Option<String>,
    pub values: BTreeMap<String, Value>,
}

pub fn parse_kv(text: &str) -> CliResult<BTreeMap<String, Value>> {
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected `key = value`", lineno + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", lineno + 1)));
        }
        out.insert(k.to_string(), Value::String(v.to_string()));
    }
    Ok(out)
}

/// Read a key-value file, or a manifest JSON (recognised by a leading `{`).
pub fn load(path: &Path) -> CliResult<FileConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: invalid manifest: {e}", path.display())))?;
        let values = match v.get("config") {
            Some(Value::Object(map)) => map.clone().into_iter().collect(),
            _ => return Err(CliError::usage(format!("{}: manifest has no config object", path.display()))),
        };
        let command = v.get("command").and_then(Value::as_str).map(str::to_string);
        return Ok(FileConfig { command, values });
    }
    Ok(FileConfig { command: None, values: parse_kv(&text)? })
}

fn convert(name: &str, kind: Kind, v: &Value) -> CliResult<Value> {
    let bad = || CliError::usage(format!("invalid value for `{name}`: {v}"));
    let text = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match kind {
        Kind::Float => {
            let x: f64 = text.parse().map_err(|_| bad())?;
            Number::from_f64(x).map(Value::Number).ok_or_else(bad)
        }
        Kind::Int => text.parse::<u64>().map(|x| Value::Number(x.into())).map_err(|_| bad()),
        Kind::Bool => text.parse::<bool>().map(Value::Bool).map_err(|_| bad()),
        Kind::Str => Ok(Value::String(text)),
    }
}

/// Resolved configuration of one command.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, Value>,
}

impl Settings {
    /// Merge file values and flags over the defaults of `keys`. Unknown file
    /// keys are rejected.
    pub fn resolve(keys: &[Key], file: &FileConfig, flags: Vec<(&'static str, Option<Value>)>) -> CliResult<Self> {
        let find = |name: &str| keys.iter().find(|k| k.name == name);
        let mut values = BTreeMap::new();
        for k in keys {
            if let Some(d) = k.default {
                values.insert(k.name.to_string(), convert(k.name, k.kind, &Value::String(d.into()))?);
            }
        }
        for (name, v) in &file.values {
            let k = find(name).ok_or_else(|| CliError::usage(format!("unknown config key `{name}`")))?;
            values.insert(name.clone(), convert(name, k.kind, v)?);
        }
        for (name, v) in flags {
            if let Some(v) = v {
                let k = find(name).expect("every flag is a declared key");
                values.insert(name.to_string(), convert(name, k.kind, &v)?);
            }
        }
        Ok(Self { values })
    }

    pub fn as_map(&self) -> &BTreeMap<String, Value> {
        &self.values
    }

    pub fn has(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    fn get(&self, name: &str) -> CliResult<&Value> {
        self.values
            .get(name)
            .ok_or_else(|| CliError::usage(format!("missing required parameter `{name}`")))
    }

    pub fn f64(&self, name: &str) -> CliResult<f64> {
        self.get(name)?.as_f64().ok_or_else(|| CliError::usage(format!("`{name}` must be a number")))
    }

    pub fn opt_f64(&self, name: &str) -> CliResult<Option<f64>> {
        if self.has(name) {
            self.f64(name).map(Some)
        } else {
            Ok(None)
        }
    }

    pub fn usize(&self, name: &str) -> CliResult<usize> {
        self.u64(name).map(|x| x as usize)
    }

    pub fn u64(&self, name: &str) -> CliResult<u64> {
        self.get(name)?.as_u64().ok_or_else(|| CliError::usage(format!("`{name}` must be a non-negative integer")))
    }

    pub fn str(&self, name: &str) -> CliResult<&str> {
        self.get(name)?.as_str().ok_or_else(|| CliError::usage(format!("`{name}` must be a string")))
    }

    pub fn bool(&self, name: &str) -> CliResult<bool> {
        self.get(name)?.as_bool().ok_or_else(|| CliError::usage(format!("`{name}` must be true or false")))
    }
}

/// `start:stop:step` (inclusive) or a comma-separated list.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = || CliError::usage(format!("invalid grid `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let p: Vec<f64> = parts.iter().map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let (a, b, step) = (p[0], p[1], p[2]);
        if !(step > 0.0 && b >= a) {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| a + step * i as f64).collect());
    }
    let v: Vec<f64> = text.split(',').map(|s| s.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: [Key; 3] = [
        key("H", Kind::Float, None),
        key("n", Kind::Int, Some("16")),
        key("family", Kind::Str, Some("sub")),
    ];

    #[test]
    fn kv_grammar() {
        let m = parse_kv("# header\nH = 0.7  # trailing\n\n family=bi\n").unwrap();
        assert_eq!(m["H"], Value::String("0.7".into()));
        assert_eq!(m["family"], Value::String("bi".into()));
        assert!(parse_kv("H 0.7").is_err());
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig { command: None, values: parse_kv("H = 0.7\nn = 8").unwrap() };
        let s = Settings::resolve(&KEYS, &file, vec![("n", Some(Value::from(32u64))), ("H", None)]).unwrap();
        assert_eq!(s.f64("H").unwrap(), 0.7);
        assert_eq!(s.usize("n").unwrap(), 32);
        assert_eq!(s.str("family").unwrap(), "sub");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let file = FileConfig { command: None, values: parse_kv("bogus = 1").unwrap() };
        assert!(matches!(Settings::resolve(&KEYS, &file, vec![]), Err(CliError::Usage(_))));
    }

    #[test]
    fn missing_required_key() {
        let s = Settings::resolve(&KEYS, &FileConfig::default(), vec![]).unwrap();
        assert!(matches!(s.f64("H"), Err(CliError::Usage(_))));
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("-1:1:0.5").unwrap(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("0.5, 2").unwrap(), vec![0.5, 2.0]);
        assert_eq!(parse_grid("-4:4:0.1").unwrap().len(), 81);
        assert!(parse_grid("1:0:0.1").is_err());
    }
}
