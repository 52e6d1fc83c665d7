//! Line-oriented `key = value` configuration files.
//!
//! Keys are the long flag names without the leading dashes. A flag given on
//! the command line wins over the file, and the file wins over built-in
//! defaults.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "fcidump", "manifest", "params", "pes", "out", "freeze", "remove", "sector", "layers", "max-iter",
    "spsa-a", "spsa-c", "spsa-A", "alpha", "gamma", "target-step", "seed", "restarts", "shots", "jobs",
    "keep-going", "energy", "angle-range", "length-range",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, (usize, String)>,
    source: String,
}

impl ConfigFile {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{source}:{}: expected 'key = value'", i + 1))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                bail!("{source}:{}: unknown key '{key}'", i + 1);
            }
            if values.insert(key.to_string(), (i + 1, value.trim().to_string())).is_some() {
                bail!("{source}:{}: duplicate key '{key}'", i + 1);
            }
        }
        Ok(Self {
            values,
            source: source.to_string(),
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| anyhow!("{}: {e}", p.display()))?;
                Self::parse(&text, &p.display().to_string())
            }
        }
    }

    /// The flag value if given, else the file value if present.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some((line, raw)) => raw
                .parse()
                .map(Some)
                .map_err(|e| anyhow!("{}:{line}: bad value for '{key}': {e}", self.source)),
        }
    }

    pub fn pick_or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    /// Boolean switches: set by the flag, or by `true`/`false` in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        self.pick_or(None, key, false)
    }
}

/// Comma-separated orbital indices; `none` or an empty string is the empty
/// list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexList(pub Vec<usize>);

impl FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        if s.is_empty() || s.eq_ignore_ascii_case("none") {
            return Ok(Self(Vec::new()));
        }
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("'{t}': {e}")))
            .collect::<std::result::Result<_, _>>()
            .map(Self)
    }
}

/// Closed interval written `lo,hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range(pub f64, pub f64);

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (lo, hi) = s.split_once(',').ok_or("expected 'lo,hi'")?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
        Ok(Self(parse(lo)?, parse(hi)?))
    }
}
