use std::collections::HashMap;
use std::fs;
use std::str::FromStr;

use clap::ValueEnum;

use super::{BackendChoice, Cli, Command, Format, Mode, ShortcutPolicy};
use crate::error::{Error, Result};
use crate::graph::MetricPolicy;
use crate::Tolerance;

const KEYS: &[&str] = &[
    "backend",
    "mode",
    "format",
    "threads",
    "seed",
    "tolerance",
    "allow-shortcut-edges",
    "input",
];

/// Settings after merging flags over the optional config file over defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub backend: BackendChoice,
    pub mode: Mode,
    pub format: Format,
    pub threads: Option<usize>,
    pub seed: u64,
    pub tolerance: Tolerance,
    pub shortcut_policy: MetricPolicy,
    /// Input path from the config file; flags take precedence.
    pub input: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            backend: BackendChoice::default(),
            mode: Mode::default(),
            format: Format::default(),
            threads: None,
            seed: 0,
            tolerance: Tolerance::default(),
            shortcut_policy: MetricPolicy::Error,
            input: None,
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<HashMap<String, String>> {
    let mut out = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "expected `key = value`".into(),
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("unknown config key `{key}`"),
            });
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

fn pick<T>(flag: Option<T>, file: &HashMap<String, String>, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file.get(key) {
        None => Ok(None),
        Some(v) => parse(v)
            .map(Some)
            .ok_or_else(|| Error::InvalidParameter(format!("config key `{key}` has invalid value `{v}`"))),
    }
}

fn value_enum<T: ValueEnum>(s: &str) -> Option<T> {
    T::from_str(s, true).ok()
}

fn number<T: FromStr>(s: &str) -> Option<T> {
    s.parse().ok()
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> Result<Self> {
        let file = match &cli.global.config {
            None => HashMap::new(),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::InvalidParameter(format!("--config {}: {e}", path.display()))
                })?;
                parse_config(&text)?
            }
        };
        let (backend, mode) = match &cli.command {
            Command::Mean { backend, mode, .. } => (*backend, *mode),
            Command::Bench(args) => (args.backend, None),
            _ => (None, None),
        };
        let g = &cli.global;
        let defaults = RunConfig::default();
        let tolerance = pick(g.tolerance, &file, "tolerance", number::<f64>)?;
        if let Some(t) = tolerance {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "--tolerance must be positive, got {t}"
                )));
            }
        }
        let threads = pick(g.threads, &file, "threads", number::<usize>)?;
        if threads == Some(0) {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        let policy = pick(g.allow_shortcut_edges, &file, "allow-shortcut-edges", value_enum::<ShortcutPolicy>)?;
        Ok(RunConfig {
            backend: pick(backend, &file, "backend", value_enum)?.unwrap_or(defaults.backend),
            mode: pick(mode, &file, "mode", value_enum)?.unwrap_or(defaults.mode),
            format: pick(g.format, &file, "format", value_enum)?.unwrap_or(defaults.format),
            threads,
            seed: pick(g.seed, &file, "seed", number)?.unwrap_or(defaults.seed),
            tolerance: tolerance.map_or(defaults.tolerance, |rel| Tolerance::new(rel, defaults.tolerance.abs)),
            shortcut_policy: match policy {
                Some(ShortcutPolicy::Warn) => MetricPolicy::Warn,
                _ => MetricPolicy::Error,
            },
            input: file.get("input").cloned(),
        })
    }
}
