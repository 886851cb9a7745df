//! Plain-text `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys match the long
//! flag names (`trials`, `snr`, `detectors`, ...); a flag given on the command
//! line wins over the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", k + 1)))?;
            let key = key.trim().replace('_', "-");
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Config(format!(
                    "line {}: duplicate key '{key}'",
                    k + 1
                )));
            }
        }
        Ok(Self { values })
    }

    /// Fails on keys the command does not understand.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), CliError> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(CliError::Config(format!("unknown config key '{k}'"))),
            None => Ok(()),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Flag value, else file value, else `default`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s.parse().map_err(|e| {
                CliError::Config(format!("config key '{key}': cannot parse '{s}': {e}"))
            }),
            None => Ok(default),
        }
    }

    /// Like [`ConfigFile::resolve`] for string-valued settings.
    pub fn resolve_str(&self, flag: Option<String>, key: &str, default: &str) -> String {
        flag.or_else(|| self.raw(key).map(str::to_string))
            .unwrap_or_else(|| default.to_string())
    }
}

/// Comma-separated list.
pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.parse()
                .map_err(|e| CliError::Config(format!("{what}: cannot parse '{p}': {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let cfg = ConfigFile::parse("# sweep\ntrials = 50\n\nsnr=0,10\nseed = 9\n").unwrap();
        assert_eq!(cfg.resolve::<u64>(None, "trials", 1).unwrap(), 50);
        assert_eq!(cfg.resolve::<u64>(Some(7), "trials", 1).unwrap(), 7);
        assert_eq!(cfg.resolve::<u64>(None, "m", 4).unwrap(), 4);
        assert_eq!(cfg.resolve_str(None, "snr", "5"), "0,10");
        assert!(cfg.check_keys(&["trials", "snr", "seed"]).is_ok());
        assert!(cfg.check_keys(&["trials"]).is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(ConfigFile::parse("trials 5").is_err());
        assert!(ConfigFile::parse("a=1\na=2").is_err());
        let cfg = ConfigFile::parse("trials = many").unwrap();
        assert!(cfg.resolve::<u64>(None, "trials", 1).is_err());
    }

    #[test]
    fn underscores_match_flag_names() {
        let cfg = ConfigFile::parse("snr_db = 3").unwrap();
        assert_eq!(cfg.raw("snr-db"), Some("3"));
    }

    #[test]
    fn lists() {
        assert_eq!(
            parse_list::<f64>("0, 10,20", "snr").unwrap(),
            vec![0.0, 10.0, 20.0]
        );
        assert!(parse_list::<f64>("0,x", "snr").is_err());
    }
}
