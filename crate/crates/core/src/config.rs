//! Flat `key = value` files. `#` starts a comment; blank lines are ignored.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    origin: String,
    entries: Vec<(String, String, usize)>,
}

impl KeyValues {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line,
                    reason: format!("expected `key = value`, got `{content}`"),
                });
            };
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse {
                    path: origin.to_string(),
                    line,
                    reason: "empty key".into(),
                });
            }
            entries.push((key.to_string(), value.trim().to_string(), line));
        }
        Ok(KeyValues {
            origin: origin.to_string(),
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Entries in file order as `(key, value, line)`.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &str, usize)> {
        self.entries
            .iter()
            .map(|(k, v, l)| (k.as_str(), v.as_str(), *l))
    }

    /// Last value for `key`, with its line number.
    pub fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((value, line)) => value.parse().map(Some).map_err(|_| Error::Parse {
                path: self.origin.clone(),
                line,
                reason: format!("invalid value `{value}` for `{key}`"),
            }),
        }
    }

    pub(crate) fn parse_f64(&self, key: &str, value: &str, line: usize) -> Result<f64> {
        value.parse().map_err(|_| Error::Parse {
            path: self.origin.clone(),
            line,
            reason: format!("invalid number `{value}` for `{key}`"),
        })
    }

    pub fn reject_unknown(&self, known: &[&str]) -> Result<()> {
        for (key, _, line) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(Error::Parse {
                    path: self.origin.clone(),
                    line: *line,
                    reason: format!("unknown key `{key}`"),
                });
            }
        }
        Ok(())
    }
}
