use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

/// A resolved parameter as recorded in a report.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Num(f64),
    Text(String),
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Num(v) => write!(f, "{v}"),
            ParamValue::Text(s) => f.write_str(s),
        }
    }
}

/// Raw `--name value` pairs handed to a check.
///
/// Every lookup is recorded so that leftover names can be rejected once the
/// check has been set up.
#[derive(Clone, Debug, Default)]
pub struct CheckParams {
    raw: BTreeMap<String, String>,
    seen: RefCell<BTreeSet<String>>,
}

impl CheckParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<K: Into<String>, V: Into<String>>(
        pairs: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        let mut out = Self::new();
        for (k, v) in pairs {
            out.insert(k, v);
        }
        out
    }

    /// Later inserts win.
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.raw.insert(key.into(), value.into());
    }

    /// Adds `other` underneath the current entries.
    pub fn with_defaults_from(mut self, other: &CheckParams) -> Self {
        for (k, v) in &other.raw {
            self.raw.entry(k.clone()).or_insert_with(|| v.clone());
        }
        self
    }

    /// Removes and returns an entry without marking it as used.
    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.raw.remove(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.raw.contains_key(key)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.seen.borrow_mut().insert(key.to_string());
        self.raw.get(key).map(String::as_str)
    }

    pub fn text_or<'a>(&'a self, key: &str, default: &'a str) -> &'a str {
        self.text(key).unwrap_or(default)
    }

    pub fn num(&self, key: &str) -> Result<Option<f64>> {
        match self.text(key) {
            None => Ok(None),
            Some(s) => parse_f64(s)
                .map(Some)
                .ok_or_else(|| Error::InvalidParams(format!("--{key}: '{s}' is not a number"))),
        }
    }

    pub fn num_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    /// Numeric entries whose name starts with `prefix`, with the prefix
    /// stripped.
    pub fn prefixed(&self, prefix: &str) -> Result<Vec<(String, f64)>> {
        let keys: Vec<String> = self
            .raw
            .keys()
            .filter(|k| k.starts_with(prefix))
            .cloned()
            .collect();
        keys.into_iter()
            .map(|k| {
                let v = self.num(&k)?.expect("key present");
                Ok((k[prefix.len()..].to_string(), v))
            })
            .collect()
    }

    /// Every entry not yet looked up, as numbers.
    pub fn remaining_numeric(&self) -> Result<Vec<(String, f64)>> {
        let keys: Vec<String> = {
            let seen = self.seen.borrow();
            self.raw.keys().filter(|k| !seen.contains(*k)).cloned().collect()
        };
        keys.into_iter()
            .map(|k| {
                let v = self.num(&k)?.expect("key present");
                Ok((k, v))
            })
            .collect()
    }

    pub fn reject_unused(&self, check: &str) -> Result<()> {
        let seen = self.seen.borrow();
        match self.raw.keys().find(|k| !seen.contains(*k)) {
            Some(k) => Err(Error::InvalidParams(format!("check {check} has no parameter --{k}"))),
            None => Ok(()),
        }
    }
}

/// Accepts plain decimal notation plus `inf`/`-inf`; rejects `nan`.
pub fn parse_f64(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| !v.is_nan())
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped; keys may not repeat.
pub fn parse_config(text: &str) -> Result<CheckParams> {
    let mut out = CheckParams::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected 'key = value'", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key or value", n + 1)));
        }
        if out.contains(k) {
            return Err(Error::Parse(format!("line {}: duplicate key '{k}'", n + 1)));
        }
        out.insert(k, v);
    }
    Ok(out)
}
