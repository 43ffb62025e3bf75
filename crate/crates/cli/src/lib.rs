//! Command-line front end for `klab-core`.
//!
//! [`dispatch`] parses an argument vector, runs one subcommand and writes its
//! result as text or JSON. Exit codes: 0 on success, 1 on domain errors, 2 on
//! usage errors.

pub mod args;
pub mod cache;
pub mod commands;
pub mod config;

use std::io::Write;

use clap::{CommandFactory, Parser};
use serde_json::{json, Map, Value};

use crate::args::Cli;
use crate::config::{FlagConfig, RunConfig};

/// Version of the JSON output layout, bumped together with the schema files.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] klab_core::Error),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Input(_) => "invalid-input",
            CliError::Config(_) => "config",
        }
    }
}

fn subcommand_name(cli: &Cli) -> &'static str {
    use args::Command::*;
    match cli.command {
        Group { .. } => "group",
        Quotient { .. } => "quotient",
        Model(_) => "model",
        Localize(_) => "localize",
        Atoms { .. } => "atoms",
        Lengths { .. } => "lengths",
        Delta { .. } => "delta",
        DeltaStar { .. } => "delta-star",
        Aamp { .. } => "aamp",
        AampSurvey { .. } => "aamp-survey",
        Halffactorial { .. } => "halffactorial",
        Realize(_) => "realize",
        Cache { .. } => "cache",
    }
}

/// Runs one invocation with the process environment.
pub fn dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    dispatch_with_env(argv, |k| std::env::var(k).ok(), out, err)
}

pub fn dispatch_with_env<I, T>(
    argv: I,
    env: impl Fn(&str) -> Option<String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = writeln!(err, "{}", e.render());
            let _ = writeln!(err, "{}", Cli::command().render_long_help());
            return 2;
        }
    };
    let flags = FlagConfig {
        cache_dir: cli.cache_dir.clone(),
        no_cache: cli.no_cache,
        threads: cli.threads,
        json: cli.json,
        ..Default::default()
    };
    let name = subcommand_name(&cli);
    let (result, json_mode) = match RunConfig::resolve(&flags, env) {
        Ok(cfg) => (run_in_pool(&cli, &cfg), cfg.json),
        Err(e) => (Err(CliError::Config(e)), cli.json),
    };
    match result {
        Ok(body) => {
            let _ = if json_mode {
                writeln!(out, "{}", serde_json::to_string_pretty(&envelope(name, body)).expect("json"))
            } else {
                write!(out, "{}", render_text(&Value::Object(body)))
            };
            0
        }
        Err(e) => {
            if json_mode {
                let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"));
            } else {
                let _ = writeln!(err, "error: {e}");
            }
            1
        }
    }
}

fn run_in_pool(cli: &Cli, cfg: &RunConfig) -> commands::Outcome {
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
            pool.install(|| commands::run(&cli.command, cfg))
        }
        None => commands::run(&cli.command, cfg),
    }
}

/// Adds the metadata fields present on every JSON document.
pub fn envelope(command: &str, body: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("schema_version".into(), json!(SCHEMA_VERSION));
    m.insert("command".into(), json!(command));
    m.extend(body);
    Value::Object(m)
}

/// Text rendering: one `key: value` line per field, nested values indented.
pub fn render_text(v: &Value) -> String {
    let mut s = String::new();
    render_into(&mut s, v, 0);
    s
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(x) => Some(x.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            Some(format!("{{{}}}", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render_into(s: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(t) => s.push_str(&format!("{pad}{k}: {t}\n")),
                    None => {
                        s.push_str(&format!("{pad}{k}:\n"));
                        render_into(s, x, depth + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(t) => s.push_str(&format!("{pad}- {t}\n")),
                    None => {
                        s.push_str(&format!("{pad}-\n"));
                        render_into(s, x, depth + 1);
                    }
                }
            }
        }
        other => s.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}
