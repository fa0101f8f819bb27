//! JSON config files merged into the argument list.
//!
//! Every key names a flag of the chosen subcommand with `-` spelled `_`.
//! Config values are inserted ahead of the command-line flags. A key whose
//! flag also appears on the command line is dropped, so flags win.

use std::ffi::OsString;
use std::path::Path;

use serde_json::Value;

/// Flags that exclude each other; choosing one on the command line also hides
/// the others in the config.
const EXCLUSIVE: &[&[&str]] = &[&["omega_m", "delta_zpf"]];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Path given by `--config PATH` or `--config=PATH`, if any.
pub fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(rest.into());
        }
    }
    None
}

fn flags_on_command_line(args: &[OsString]) -> Vec<String> {
    args.iter()
        .filter_map(|a| a.to_str()?.strip_prefix("--"))
        .map(|f| f.split('=').next().unwrap_or(f).replace('-', "_"))
        .collect()
}

fn render(key: &str, value: &Value) -> Result<Option<String>, ConfigError> {
    let scalar = |v: &Value| -> Result<String, ConfigError> {
        match v {
            Value::Number(n) => Ok(n.to_string()),
            Value::String(s) => Ok(s.clone()),
            other => Err(ConfigError(format!(
                "config key {key}: unsupported value {other}"
            ))),
        }
    };
    Ok(match value {
        Value::Null | Value::Bool(false) => None,
        Value::Bool(true) => Some(String::new()),
        Value::Array(items) => Some(
            items
                .iter()
                .map(scalar)
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
        ),
        v => Some(scalar(v)?),
    })
}

/// Flags generated from a parsed config object.
pub fn config_flags(config: &Value, given: &[String]) -> Result<Vec<OsString>, ConfigError> {
    let Value::Object(map) = config else {
        return Err(ConfigError("config file must hold a JSON object".into()));
    };
    let hidden = |key: &str| {
        given.iter().any(|g| g == key)
            || EXCLUSIVE.iter().any(|group| {
                group.contains(&key) && group.iter().any(|g| given.iter().any(|x| x == g))
            })
    };
    let mut out = Vec::new();
    for (key, value) in map {
        if key == "config" {
            return Err(ConfigError(
                "config files cannot include other config files".into(),
            ));
        }
        if hidden(key) {
            continue;
        }
        if let Some(v) = render(key, value)? {
            out.push(format!("--{}", key.replace('_', "-")).into());
            if !matches!(value, Value::Bool(true)) {
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// `args` with the config file's flags spliced in right after the subcommand.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| {
        ConfigError(format!(
            "cannot read config {}: {e}",
            path.to_string_lossy()
        ))
    })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| {
        ConfigError(format!(
            "config {} is not valid JSON: {e}",
            path.to_string_lossy()
        ))
    })?;
    let extra = config_flags(&value, &flags_on_command_line(&args))?;
    // program name, then the first bare word is the subcommand
    let at = args
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .ok_or_else(|| ConfigError("--config needs a subcommand".into()))?;
    let mut merged = args[..at].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&args[at..]);
    Ok(merged)
}
