//! Flat `key=value` parameters from the command line and config files.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Parameters given explicitly, plus every value (explicit or default) read
/// so far.
#[derive(Debug, Default)]
pub struct Params {
    given: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

fn split_pair(item: &str) -> Result<(String, String)> {
    match item.split_once('=') {
        Some((k, v)) if !k.trim().is_empty() => Ok((k.trim().to_string(), v.trim().to_string())),
        _ => Err(CliError::Config(format!("expected key=value, got '{item}'"))),
    }
}

impl Params {
    /// Config-file lines first, then command-line pairs on top.
    pub fn load(config: Option<&Path>, pairs: &[String]) -> Result<Self> {
        let mut given = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = split_pair(line)?;
                given.insert(k, v);
            }
        }
        for pair in pairs {
            let (k, v) = split_pair(pair)?;
            given.insert(k, v);
        }
        Ok(Self {
            given,
            resolved: BTreeMap::new(),
        })
    }

    pub fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        match self.given.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!(
                "unknown key '{k}' (accepted: {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    pub fn has(&self, key: &str) -> bool {
        self.given.contains_key(key)
    }

    pub fn raw(&mut self, key: &str) -> Option<String> {
        let v = self.given.get(key).cloned()?;
        self.resolved.insert(key.to_string(), v.clone());
        Some(v)
    }

    pub fn get<T>(&mut self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Config(format!("bad value '{v}' for {key}: {e}")))
            })
            .transpose()
    }

    pub fn get_or<T>(&mut self, key: &str, default: T) -> Result<T>
    where
        T: FromStr + ToString,
        T::Err: std::fmt::Display,
    {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    pub fn require<T>(&mut self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::Config(format!("missing required key '{key}'")))
    }

    /// Records a derived value in the resolved config.
    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}
