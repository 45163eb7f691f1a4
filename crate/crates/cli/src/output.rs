//! Self-describing CSV: `#` manifest lines, one header row, data rows.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: &str, params: Vec<(String, String)>) -> Self {
        Self {
            command: command.to_string(),
            params,
            version: format!("cdising {}", env!("CARGO_PKG_VERSION")),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    fn write_to(&self, out: &mut String) {
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# version: {}", self.version);
        let _ = writeln!(out, "# timestamp: {}", self.timestamp);
        for (key, value) in &self.params {
            let _ = writeln!(out, "# {key} = {value}");
        }
    }
}

/// Floats carry 15 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.14e}")
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, manifest: &RunManifest) -> String {
        let mut out = String::new();
        manifest.write_to(&mut out);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_keeps_fifteen_digits() {
        assert_eq!(float(0.125), "1.25000000000000e-1");
        assert_eq!(float(1.0 / 3.0).parse::<f64>().unwrap(), 0.333333333333333);
    }

    #[test]
    fn render_layout() {
        let manifest = RunManifest {
            command: "coeffs".into(),
            params: vec![("n".into(), "4".into())],
            version: "cdising 0".into(),
            timestamp: "then".into(),
        };
        let mut table = Table::new(&["m", "h_m"]);
        table.push(vec!["1".into(), float(0.125)]);
        let text = table.render(&manifest);
        assert_eq!(
            text,
            "# command: coeffs\n# version: cdising 0\n# timestamp: then\n# n = 4\nm,h_m\n1,1.25000000000000e-1\n"
        );
    }
}
