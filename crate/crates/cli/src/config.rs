//! `key = value` documents with optional `[section]` headers.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::CliError;

/// Every accepted key and the section it belongs to.
pub const KEYS: &[(&str, &str)] = &[
    ("chart", "chart"),
    ("chart", "radius"),
    ("chart", "scale"),
    ("mesh", "mesh_file"),
    ("mesh", "domain"),
    ("mesh", "base"),
    ("mesh", "grading"),
    ("mesh", "levels"),
    ("mesh", "degree"),
    ("mesh", "bc"),
    ("model", "model"),
    ("model", "f"),
    ("model", "eps"),
    ("model", "kappa"),
    ("model", "lambda"),
    ("model", "mu"),
    ("model", "penalty"),
    ("eigen", "tol"),
    ("eigen", "dense_threshold"),
    ("eigen", "krylov_dim"),
    ("eigen", "max_iterations"),
    ("eigen", "kernel_tol"),
    ("run", "seed"),
    ("run", "threads"),
    ("run", "out"),
    ("run", "dump_matrices"),
    ("study", "deltas"),
    ("study", "stretches"),
    ("study", "stretch_base"),
    ("study", "grid"),
    ("study", "motions"),
    ("study", "points"),
    ("study", "pressure"),
];

fn section_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(_, k)| *k == key).map(|(s, _)| *s)
}

/// Flat key/value store; later insertions override earlier ones.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    /// Parses a document. Keys may appear at top level or under their own
    /// section; `#` and `;` start comments.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| CliError::Validation(format!("config line {}: {msg}", n + 1));
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| at(format!("unterminated section header `{line}`")))?
                    .trim();
                if !KEYS.iter().any(|(s, _)| *s == name) {
                    return Err(at(format!("unknown section `{name}`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match (section_of(key), &section) {
                (None, _) => return Err(at(format!("unknown key `{key}`"))),
                (Some(s), Some(cur)) if s != cur => {
                    return Err(at(format!("key `{key}` belongs to section [{s}], not [{cur}]")))
                }
                _ => {}
            }
            if cfg.values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(at(format!("duplicate key `{key}`")));
            }
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<(), CliError> {
        if section_of(key).is_none() {
            return Err(CliError::Validation(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Validation(format!("invalid value `{v}` for `{key}`: {e}")))
            })
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.raw(key)
            .ok_or_else(|| CliError::Validation(format!("missing required key `{key}` (flag --{})", key.replace('_', "-"))))
    }

    /// Comma-separated list of numbers.
    pub fn list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.raw(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|e| CliError::Validation(format!("invalid entry `{s}` in `{key}`: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }
}
