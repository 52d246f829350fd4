//! Flat TOML run configuration. Keys match the long flag names with `-`
//! replaced by `_`; flags given on the command line override file values.
//! A `manifest.json` written by an earlier run is accepted too, in which
//! case its `config` object is used.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, Result};
use crate::manifest::RunManifest;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_ENV: &str = "ASBM_OUTPUT_ROOT";

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

/// Overlays `flags` on the optional config file and deserializes the result.
pub fn merge<T: Serialize + DeserializeOwned>(file: Option<&Path>, flags: &T) -> Result<T> {
    let mut base = Map::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        base = if path.extension().is_some_and(|x| x == "json") {
            let v: Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            match serde_json::from_value::<RunManifest>(v.clone()) {
                Ok(m) => object(m.config),
                Err(_) => object(v),
            }
        } else {
            let table: toml::Table = toml::from_str(&text)?;
            object(serde_json::to_value(table)?)
        };
        // reject unknown keys early with the file name attached
        serde_json::from_value::<T>(Value::Object(base.clone()))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    base.extend(object(serde_json::to_value(flags)?));
    serde_json::from_value(Value::Object(base)).map_err(|e| CliError::Usage(e.to_string()))
}

/// `out` if given, else `$ASBM_OUTPUT_ROOT/<name>`, else `asbm-out/<name>`.
pub fn output_dir(out: Option<&PathBuf>, name: &str) -> PathBuf {
    match out {
        Some(p) => p.clone(),
        None => std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("asbm-out"))
            .join(name),
    }
}

/// Parses `"a,b;c,d"` into a square matrix.
pub fn parse_matrix(s: &str) -> std::result::Result<Vec<Vec<f64>>, String> {
    let rows: Vec<Vec<f64>> = s
        .split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
                .collect()
        })
        .collect::<std::result::Result<_, _>>()?;
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err(format!("matrix {s:?} is not square"));
    }
    Ok(rows)
}

/// Writes pretty JSON followed by a newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}
