//! Flag and config-file merging.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::output::Format;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NETSEG_OUT_DIR";

/// Flat JSON object whose keys mirror the long flag names with `_` for `-`.
#[derive(Debug, Default)]
pub struct ConfigFile(Map<String, Value>);

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        match serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))? {
            Value::Object(map) => Ok(Self(map)),
            _ => bail!("config {} must hold a JSON object", path.display()),
        }
    }

    fn get<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        self.0
            .get(key)
            .map(|v| serde_json::from_value(v.clone()).with_context(|| format!("config key '{key}'")))
            .transpose()
    }

    /// Flag value, else the config value for `key`.
    pub fn merge<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }

    /// As [`merge`](Self::merge), falling back to `default`.
    pub fn merge_or<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.merge(flag, key)?.unwrap_or(default))
    }

    /// As [`merge`](Self::merge), failing when neither source sets `key`.
    pub fn require<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.merge(flag, key)?.with_context(|| format!("missing --{} (or config key '{key}')", key.replace('_', "-")))
    }

    /// Boolean switch set by either source.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.get(key)?.unwrap_or(false))
    }
}

/// Settings shared by every subcommand.
#[derive(Debug)]
pub struct RunConfig {
    pub out_dir: PathBuf,
    pub format: Format,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn resolve(
        config: &ConfigFile,
        out_dir: Option<PathBuf>,
        format: Option<Format>,
        seed: Option<u64>,
    ) -> Result<Self> {
        let out_dir = match config.merge(out_dir, "out_dir")? {
            Some(dir) => dir,
            None => std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("netseg-out")),
        };
        Ok(Self { out_dir, format: config.merge_or(format, "format", Format::Csv)?, seed: config.merge(seed, "seed")? })
    }

    /// Seed of a stochastic run.
    pub fn seed(&self) -> Result<u64> {
        self.seed.context("this run is stochastic: pass --seed (or config key 'seed')")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ConfigFile {
        match serde_json::from_str(json).unwrap() {
            Value::Object(map) => ConfigFile(map),
            _ => unreachable!(),
        }
    }

    #[test]
    fn flags_win_over_config() {
        let c = config(r#"{"p": 0.3, "group_sizes": [5, 6], "quick": true}"#);
        assert_eq!(c.merge(Some(0.1), "p").unwrap(), Some(0.1));
        assert_eq!(c.merge::<f64>(None, "p").unwrap(), Some(0.3));
        assert_eq!(c.merge::<Vec<usize>>(None, "group_sizes").unwrap(), Some(vec![5, 6]));
        assert_eq!(c.merge_or::<f64>(None, "q", 0.2).unwrap(), 0.2);
        assert!(c.switch(false, "quick").unwrap());
        assert!(c.require::<f64>(None, "q").is_err());
        assert!(c.merge::<u64>(None, "p").is_err());
    }
}
