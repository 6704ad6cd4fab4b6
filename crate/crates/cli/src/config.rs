//! Merging a flat JSON config file under the command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::parser::ValueSource;
use clap::{CommandFactory, FromArgMatches};
use serde_json::Value;

use crate::args::Cli;
use crate::Failure;

/// Parses `argv`; if `--config` names a file, its keys fill in any option not
/// given explicitly on the command line.
pub fn parse(argv: Vec<OsString>) -> Result<Cli, Failure> {
    let matches = Cli::command().try_get_matches_from(&argv)?;
    let (sub_name, sub) = matches.subcommand().expect("subcommand is required");
    let Some(path) = sub.get_one::<PathBuf>("config") else {
        return Ok(Cli::from_arg_matches(&matches)?);
    };

    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("config {} is not valid JSON: {e}", path.display())))?;
    let Value::Object(entries) = doc else {
        return Err(Failure::Usage("config must be a flat JSON object".into()));
    };

    let root = Cli::command();
    let cmd = root.find_subcommand(sub_name).expect("parsed subcommand exists");
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in &entries {
        let id = key.replace('-', "_");
        let arg = cmd
            .get_arguments()
            .find(|a| a.get_id().as_str() == id && a.get_long().is_some())
            .filter(|a| a.get_id().as_str() != "config")
            .ok_or_else(|| Failure::Usage(format!("unknown config key {key:?} for {sub_name}")))?;
        if sub.value_source(&id) == Some(ValueSource::CommandLine) {
            continue;
        }
        let flag = format!("--{}", arg.get_long().expect("filtered on long"));
        if !arg.get_action().takes_values() {
            match value {
                Value::Bool(true) => extra.push(flag.into()),
                Value::Bool(false) => {}
                _ => return Err(Failure::Usage(format!("config key {key:?} must be true or false"))),
            }
            continue;
        }
        let items = match value {
            Value::Array(items) => items.clone(),
            other => vec![other.clone()],
        };
        for item in items {
            let text = match item {
                Value::String(s) => s,
                Value::Number(n) => n.to_string(),
                Value::Bool(b) => b.to_string(),
                _ => return Err(Failure::Usage(format!("config key {key:?} has an unsupported value"))),
            };
            extra.push(format!("{flag}={text}").into());
        }
    }

    let mut merged = argv;
    merged.extend(extra);
    Ok(Cli::from_arg_matches(&Cli::command().try_get_matches_from(merged)?)?)
}
