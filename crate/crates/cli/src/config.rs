//! `key=value` run configuration. Command-line flags win over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

pub const KEYS: &[&str] = &[
    "seed",
    "json",
    "bound",
    "terms",
    "workers",
    "oeis",
    "out",
    "online",
    "trials",
    "cutoff",
    "max_weight",
    "dim",
    "reading",
    "min_match_terms",
    "trim_leading_ones",
    "allow_offset",
];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value", i + 1))?;
            let k = k.trim().replace('-', "_");
            if !KEYS.contains(&k.as_str()) {
                return Err(format!("config line {}: unknown key {k:?}", i + 1));
            }
            if values.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(format!("config line {}: {k} given twice", i + 1));
            }
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String> {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| format!("config value {key}={v:?} is invalid"))
            })
            .transpose()
    }

    /// `flag`, else the file value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String> {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// A switch is on if the flag is given or the file sets it true.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, String> {
        Ok(flag || self.get::<bool>(key)?.unwrap_or(false))
    }
}
