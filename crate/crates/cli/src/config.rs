//! Plain `key = value` run files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

pub const KEYS: [&str; 14] = [
    "n",
    "g0",
    "gf",
    "t-final",
    "coupling",
    "m-max",
    "rel-tol",
    "abs-tol",
    "out",
    "threads",
    "g",
    "samples",
    "g-grid",
    "inject-fault",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }

    /// Blank lines and `#` comments are skipped; keys use the long flag names.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{key}`", i + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let cfg = ConfigFile::parse("# run\nn = 10,20\n\nt_final=5 # seconds\n").unwrap();
        assert_eq!(cfg.get("n"), Some("10,20"));
        assert_eq!(cfg.get("t-final"), Some("5"));
        assert_eq!(cfg.get("g0"), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bare_words() {
        assert!(ConfigFile::parse("colour = red")
            .unwrap_err()
            .contains("unknown key"));
        assert!(ConfigFile::parse("n 10").is_err());
    }
}
