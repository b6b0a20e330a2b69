//! `key = value` text records shared by the profile and scenario files.

use crate::error::{Error, Result};

/// Ordered key-value pairs read from one file.
#[derive(Debug, Clone)]
pub(crate) struct KvRecords {
    source_name: String,
    entries: Vec<(String, String, usize)>,
}

impl KvRecords {
    /// Parse `text`. Blank lines and `#` comments are skipped; every key must be
    /// in `allowed` and appear at most once.
    pub(crate) fn parse(text: &str, source_name: &str, allowed: &[&str]) -> Result<KvRecords> {
        let mut entries: Vec<(String, String, usize)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                source_name: source_name.to_string(),
                line: line_no,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !allowed.contains(&key) {
                return Err(err(format!("unknown key `{key}`")));
            }
            if entries.iter().any(|(k, _, _)| k == key) {
                return Err(err(format!("duplicate key `{key}`")));
            }
            entries.push((key.to_string(), value.to_string(), line_no));
        }
        Ok(KvRecords {
            source_name: source_name.to_string(),
            entries,
        })
    }

    pub(crate) fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    }

    pub(crate) fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| Error::MissingKey {
            source_name: self.source_name.clone(),
            key: key.to_string(),
        })
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map_or(0, |(_, _, l)| *l)
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str, value: &str, what: &str) -> Result<T> {
        value.parse().map_err(|_| Error::Parse {
            source_name: self.source_name.clone(),
            line: self.line_of(key),
            message: format!("`{key}`: expected {what}, got `{value}`"),
        })
    }

    pub(crate) fn require_f64(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        let x: f64 = self.parse_value(key, v, "a number")?;
        if !x.is_finite() {
            return Err(Error::invalid(key, "must be finite"));
        }
        Ok(x)
    }

    pub(crate) fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            Some(_) => self.require_f64(key),
            None => Ok(default),
        }
    }

    pub(crate) fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            Some(v) => self.parse_value(key, v, "a non-negative integer"),
            None => Ok(default),
        }
    }
}
