//! Config-file expansion.
//!
//! A TOML file mirrors the flags: top-level keys set global flags and a
//! table per subcommand (`[params]`, `[search.run]`, ...) sets its flags.
//! The file's flags are spliced into the argument list ahead of the
//! explicit ones, and a key that also appears explicitly is dropped.

use std::path::Path;

use sha2::{Digest, Sha256};
use toml::{Table, Value};

const GLOBAL_VALUED: [&str; 3] = ["--config", "--jobs", "--output"];
const GLOBAL_KEYS: [&str; 2] = ["jobs", "output"];
const GROUPS: [&str; 7] = ["circuit", "universal", "grid", "anticonc", "robust", "etr", "search"];

pub struct Expanded {
    pub argv: Vec<String>,
    /// SHA-256 of the config file bytes.
    pub digest: Option<String>,
}

/// Raw value of `--config` if present.
fn config_path(argv: &[String]) -> Option<String> {
    let mut it = argv.iter().skip(1);
    while let Some(t) = it.next() {
        if t == "--" {
            break;
        }
        if t == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = t.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

/// Positions of the command and, for groups, the subcommand token.
fn command_path(argv: &[String]) -> Vec<usize> {
    let mut path = Vec::new();
    let mut i = 1;
    while i < argv.len() && path.len() < 2 {
        let t = argv[i].as_str();
        if GLOBAL_VALUED.contains(&t) {
            i += 2;
            continue;
        }
        if t.starts_with('-') {
            if path.len() == 1 {
                // A non-global flag after a leaf command ends the search.
                break;
            }
            i += 1;
            continue;
        }
        path.push(i);
        if path.len() == 1 && !GROUPS.contains(&t) {
            break;
        }
        i += 1;
    }
    path
}

fn explicit(argv: &[String], flag: &str) -> bool {
    argv.iter().any(|t| t == flag || t.strip_prefix(flag).is_some_and(|rest| rest.starts_with('=')))
}

fn scalar(key: &str, v: &Value) -> Result<String, String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        Value::Float(_) => Err(format!("config key `{key}`: write fractions as strings such as \"1/3\"")),
        _ => Err(format!("config key `{key}`: unsupported value")),
    }
}

fn flags(table: &Table, skip_explicit: &[String], reserved: Option<&[&str]>) -> Result<Vec<String>, String> {
    let mut out = Vec::new();
    for (key, value) in table {
        if let Some(allowed) = reserved {
            if !allowed.contains(&key.as_str()) {
                return Err(format!("config key `{key}` is not a global flag"));
            }
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if explicit(skip_explicit, &flag) {
            continue;
        }
        match value {
            Value::Boolean(true) => out.push(flag),
            Value::Boolean(false) => {}
            Value::Array(items) => {
                for item in items {
                    out.push(flag.clone());
                    out.push(scalar(key, item)?);
                }
            }
            Value::Table(_) => return Err(format!("config key `{key}` is a table where a flag was expected")),
            other => {
                out.push(flag);
                out.push(scalar(key, other)?);
            }
        }
    }
    Ok(out)
}

/// Splices the config file's flags into `argv`.
pub fn expand(argv: Vec<String>) -> Result<Expanded, String> {
    let Some(path) = config_path(&argv) else {
        return Ok(Expanded { argv, digest: None });
    };
    let bytes = std::fs::read(Path::new(&path)).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let digest = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| format!("config {path} is not UTF-8"))?;
    let table: Table = text.parse().map_err(|e| format!("config {path}: {e}"))?;

    let globals: Table = table.iter().filter(|(_, v)| !v.is_table()).map(|(k, v)| (k.clone(), v.clone())).collect();
    let global_flags = flags(&globals, &argv, Some(&GLOBAL_KEYS))?;

    let cmd_path = command_path(&argv);
    let mut section = None;
    if let Some(&c) = cmd_path.first() {
        let cmd = table.get(&argv[c]).and_then(Value::as_table);
        section = match cmd_path.get(1) {
            Some(&s) => cmd.and_then(|t| t.get(&argv[s])).and_then(Value::as_table),
            None if GROUPS.contains(&argv[c].as_str()) => None,
            None => cmd,
        };
    }
    let leaf = cmd_path.last().copied();
    let section_flags = match (section, leaf) {
        (Some(t), Some(l)) => {
            let scalars: Table = t.iter().filter(|(_, v)| !v.is_table()).map(|(k, v)| (k.clone(), v.clone())).collect();
            flags(&scalars, &argv[l + 1..], None)?
        }
        _ => Vec::new(),
    };

    let mut out = vec![argv[0].clone()];
    out.extend(global_flags);
    match leaf {
        Some(l) => {
            out.extend(argv[1..=l].iter().cloned());
            out.extend(section_flags);
            out.extend(argv[l + 1..].iter().cloned());
        }
        None => out.extend(argv[1..].iter().cloned()),
    }
    Ok(Expanded { argv: out, digest: Some(digest) })
}
