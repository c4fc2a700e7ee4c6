//! `key = value` config files whose entries become argument defaults.
//!
//! Top-level keys apply to every subcommand that has a matching long flag.
//! A `[name]` table applies only to that subcommand and wins over top-level
//! keys. Keys may use `_` or `-`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{ArgAction, Command};

pub type Entries = BTreeMap<String, String>;

pub fn load(path: &Path) -> anyhow::Result<toml::Table> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    text.parse::<toml::Table>().with_context(|| format!("parsing config {}", path.display()))
}

fn scalar(key: &str, v: &toml::Value) -> anyhow::Result<String> {
    Ok(match v {
        toml::Value::String(s) => s.clone(),
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::Float(f) => f.to_string(),
        toml::Value::Boolean(b) => b.to_string(),
        toml::Value::Array(items) => {
            items.iter().map(|i| scalar(key, i)).collect::<anyhow::Result<Vec<_>>>()?.join(",")
        }
        _ => bail!("config key {key}: unsupported value"),
    })
}

/// Flattened entries for `subcommand`.
pub fn entries(table: &toml::Table, subcommand: &str) -> anyhow::Result<Entries> {
    let mut out = Entries::new();
    for (k, v) in table {
        if !v.is_table() {
            out.insert(k.replace('_', "-"), scalar(k, v)?);
        }
    }
    if let Some(toml::Value::Table(section)) = table.get(subcommand) {
        for (k, v) in section {
            out.insert(k.replace('_', "-"), scalar(k, v)?);
        }
    }
    Ok(out)
}

/// Finds `--config PATH` or `--config=PATH` without a full parse.
pub fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(rest) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(rest));
        }
    }
    None
}

/// First positional argument that names a subcommand of `cmd`.
pub fn subcommand_name(cmd: &Command, args: &[OsString]) -> Option<String> {
    args.iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .find(|a| cmd.find_subcommand(a).is_some())
}

/// Installs `entries` as defaults on `sub` (and on global flags). Keys that
/// match no flag are returned.
pub fn apply(mut cmd: Command, sub: &str, entries: &Entries) -> (Command, Vec<String>) {
    let mut unknown = Vec::new();
    for (key, value) in entries {
        if key == "config" {
            continue;
        }
        let in_sub = cmd
            .find_subcommand(sub)
            .is_some_and(|s| s.get_arguments().any(|a| a.get_long() == Some(key.as_str())));
        let in_root = cmd.get_arguments().any(|a| a.get_long() == Some(key.as_str()));
        if in_sub {
            cmd = cmd.mut_subcommand(sub, |s| with_default(s, key, value));
        } else if in_root {
            cmd = with_default(cmd, key, value);
        } else {
            unknown.push(key.clone());
        }
    }
    (cmd, unknown)
}

fn with_default(cmd: Command, long: &str, value: &str) -> Command {
    let id = cmd.get_arguments().find(|a| a.get_long() == Some(long)).map(|a| a.get_id().clone()).unwrap();
    let value = value.to_string();
    cmd.mut_arg(id, move |a| {
        let flag = matches!(a.get_action(), ArgAction::SetTrue | ArgAction::SetFalse);
        if flag && !matches!(value.as_str(), "true" | "false") {
            return a;
        }
        a.required(false).default_value(value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_override_top_level() {
        let t: toml::Table = "tolerance = 2\npretty = true\n[evaluate]\ntolerance = 0\n".parse().unwrap();
        let e = entries(&t, "evaluate").unwrap();
        assert_eq!(e["tolerance"], "0");
        assert_eq!(e["pretty"], "true");
        assert_eq!(entries(&t, "bench").unwrap()["tolerance"], "2");
    }

    #[test]
    fn arrays_join_with_commas() {
        let t: toml::Table = "ratios = [0.8, 0.1, 0.1]\ntoken_limit = 100".parse().unwrap();
        let e = entries(&t, "build").unwrap();
        assert_eq!(e["ratios"], "0.8,0.1,0.1");
        assert_eq!(e["token-limit"], "100");
    }

    #[test]
    fn finds_config_flag() {
        let a = |v: &[&str]| v.iter().map(OsString::from).collect::<Vec<_>>();
        assert_eq!(config_path(&a(&["x", "build", "--config", "c.toml"])), Some(PathBuf::from("c.toml")));
        assert_eq!(config_path(&a(&["x", "--config=c.toml", "build"])), Some(PathBuf::from("c.toml")));
        assert_eq!(config_path(&a(&["x", "build", "--", "--config", "c"])), None);
    }
}
