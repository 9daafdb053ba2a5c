//! `--config` files: one JSON object whose keys mirror a subcommand's long
//! flags. Flags given on the command line win over file values.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use std::path::Path;

/// Overlays the non-null fields of `args` onto the config file at `path`.
pub fn merge<T>(args: &T, path: Option<&Path>) -> Result<T>
where
    T: Serialize + DeserializeOwned,
{
    let Some(path) = path else {
        return Ok(serde_json::from_value(serde_json::to_value(args)?)?);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    let Value::Object(file) = file else {
        bail!("{}: config must be a JSON object", path.display());
    };
    let Value::Object(flags) = serde_json::to_value(args)? else {
        unreachable!("argument structs serialize to objects");
    };
    let unknown: Vec<&String> = file.keys().filter(|k| !flags.contains_key(*k)).collect();
    if !unknown.is_empty() {
        bail!("{}: unknown config keys {unknown:?}", path.display());
    }
    let mut merged: Map<String, Value> = file;
    for (k, v) in flags {
        if !v.is_null() {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).with_context(|| format!("invalid values in {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    #[serde(rename_all = "kebab-case")]
    struct Args {
        k: Option<usize>,
        rank_tol: Option<f64>,
        mdiv: Option<Vec<usize>>,
    }

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        std::io::Write::write_all(&mut f, text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn flags_override_file() {
        let f = file(r#"{"k": 3, "rank-tol": 1e-6, "mdiv": [2, 4]}"#);
        let args = Args { k: Some(2), rank_tol: None, mdiv: None };
        let m = merge(&args, Some(f.path())).unwrap();
        assert_eq!(m, Args { k: Some(2), rank_tol: Some(1e-6), mdiv: Some(vec![2, 4]) });
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let f = file(r#"{"kk": 3}"#);
        let args = Args { k: None, rank_tol: None, mdiv: None };
        assert!(merge(&args, Some(f.path())).is_err());
    }
}
