//! `key = value` configuration files and the resolution order
//! flag > config > environment (`BAGUS_SEED`, seed only) > built-in default.

use crate::errors::{CliError, CliResult};
use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Default, Clone)]
pub struct Config {
    map: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    CliError::usage(format!(
                        "{}:{}: expected 'key = value'",
                        path.display(),
                        lineno + 1
                    ))
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Config { map })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::usage(format!("config key '{key}': cannot parse '{raw}'"))
            }),
        }
    }

    /// flag > config > default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(flag
            .map(Ok)
            .or_else(|| self.get::<T>(key).transpose())
            .transpose()?
            .unwrap_or(default))
    }

    /// Seed resolution adds the `BAGUS_SEED` environment variable as the
    /// last resort before the default 0.
    pub fn resolve_seed(&self, flag: Option<u64>) -> CliResult<u64> {
        if let Some(s) = flag {
            return Ok(s);
        }
        if let Some(s) = self.get::<u64>("seed")? {
            return Ok(s);
        }
        match std::env::var("BAGUS_SEED") {
            Ok(raw) => raw
                .parse::<u64>()
                .map_err(|_| CliError::usage(format!("BAGUS_SEED: cannot parse '{raw}'"))),
            Err(_) => Ok(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_and_resolves_with_precedence() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "# comment\nseed = 9\njobs = 3").unwrap();
        let cfg = Config::load(Some(&path)).unwrap();
        assert_eq!(cfg.resolve(None, "jobs", 1usize).unwrap(), 3);
        assert_eq!(cfg.resolve(Some(5usize), "jobs", 1).unwrap(), 5);
        assert_eq!(cfg.resolve(None, "missing", 7u32).unwrap(), 7);
        assert_eq!(cfg.resolve_seed(None).unwrap(), 9);
        assert_eq!(cfg.resolve_seed(Some(2)).unwrap(), 2);
    }

    #[test]
    fn rejects_malformed_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, "not a pair\n").unwrap();
        assert_eq!(Config::load(Some(&path)).unwrap_err().exit_code(), 2);
    }
}
