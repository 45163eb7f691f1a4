//! Merges command-line flags over config-file values over defaults.

use std::path::PathBuf;
use std::str::FromStr;

use cdising::{CouplingModel, Tolerances};

use crate::cli::{CommonArgs, CouplingKind};
use crate::config::ConfigFile;
use crate::error::CliError;

pub struct Resolver<'a> {
    common: &'a CommonArgs,
    file: ConfigFile,
    /// Resolved values in the order they were requested, for the manifest.
    pub record: Vec<(String, String)>,
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("config key `{key}`: cannot parse `{raw}`")))
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl<'a> Resolver<'a> {
    pub fn new(common: &'a CommonArgs) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Ok(Self {
            common,
            file,
            record: Vec::new(),
        })
    }

    pub fn scalar<T: FromStr + ToString + Copy>(
        &mut self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T, CliError> {
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => v,
            (None, Some(raw)) => parse_value(key, raw)?,
            (None, None) => default,
        };
        self.record.push((key.to_string(), value.to_string()));
        Ok(value)
    }

    pub fn optional<T: FromStr + ToString + Copy>(
        &mut self,
        key: &str,
        flag: Option<T>,
    ) -> Result<Option<T>, CliError> {
        let value = match (flag, self.file.get(key)) {
            (Some(v), _) => Some(v),
            (None, Some(raw)) => Some(parse_value(key, raw)?),
            (None, None) => None,
        };
        if let Some(v) = value {
            self.record.push((key.to_string(), v.to_string()));
        }
        Ok(value)
    }

    pub fn list<T: FromStr + ToString + Clone>(
        &mut self,
        key: &str,
        flag: &[T],
        default: &[T],
    ) -> Result<Vec<T>, CliError> {
        let values = if !flag.is_empty() {
            flag.to_vec()
        } else if let Some(raw) = self.file.get(key) {
            raw.split(',')
                .map(|v| parse_value(key, v))
                .collect::<Result<_, _>>()?
        } else {
            default.to_vec()
        };
        if values.is_empty() {
            return Err(CliError::usage(format!("`{key}` needs at least one value")));
        }
        self.record.push((key.to_string(), join(&values)));
        Ok(values)
    }

    pub fn single_n(&mut self, default: usize) -> Result<usize, CliError> {
        let ns = self.list("n", &self.common.n.clone(), &[default])?;
        match ns.as_slice() {
            [n] => Ok(*n),
            _ => Err(CliError::usage("this command takes a single --n")),
        }
    }

    pub fn single_t(&mut self, default: f64) -> Result<f64, CliError> {
        let ts = self.list("t-final", &self.common.t_final.clone(), &[default])?;
        match ts.as_slice() {
            [t] => Ok(*t),
            _ => Err(CliError::usage("this command takes a single --t-final")),
        }
    }

    pub fn ns(&mut self, default: &[usize]) -> Result<Vec<usize>, CliError> {
        self.list("n", &self.common.n.clone(), default)
    }

    pub fn ts(&mut self, default: &[f64]) -> Result<Vec<f64>, CliError> {
        self.list("t-final", &self.common.t_final.clone(), default)
    }

    pub fn g0(&mut self) -> Result<f64, CliError> {
        self.scalar("g0", self.common.g0, 5.0)
    }

    pub fn gf(&mut self) -> Result<f64, CliError> {
        self.scalar("gf", self.common.gf, 0.0)
    }

    pub fn coupling_kind(&mut self, default: CouplingKind) -> Result<CouplingKind, CliError> {
        let kind = match (self.common.coupling, self.file.get("coupling")) {
            (Some(c), _) => c,
            (None, Some(raw)) => parse_value("coupling", raw)?,
            (None, None) => default,
        };
        self.record
            .push(("coupling".into(), kind_name(kind).into()));
        Ok(kind)
    }

    pub fn m_max(&mut self) -> Result<Option<usize>, CliError> {
        self.optional("m-max", self.common.m_max)
    }

    /// Coupling model for chain length `n`; truncation defaults to `M = 0`.
    pub fn model(
        kind: CouplingKind,
        m_max: Option<usize>,
        n: usize,
    ) -> Result<CouplingModel, CliError> {
        let model = match kind {
            CouplingKind::Exact => CouplingModel::ExactClosed,
            CouplingKind::Direct => CouplingModel::DirectSum,
            CouplingKind::Thermo => CouplingModel::Thermodynamic,
            CouplingKind::Truncated => CouplingModel::Truncated {
                max_range: m_max.unwrap_or(0),
            },
        };
        model
            .validate(n)
            .map_err(|e| CliError::usage(format!("N = {n}: {e}")))?;
        Ok(model)
    }

    pub fn tolerances(&mut self) -> Result<Tolerances, CliError> {
        let default = Tolerances::default();
        let rel = self.scalar("rel-tol", self.common.rel_tol, default.rel)?;
        let abs = self.scalar("abs-tol", self.common.abs_tol, default.abs)?;
        Tolerances::new(rel, abs).map_err(|e| CliError::usage(e.to_string()))
    }

    pub fn threads(&mut self) -> Result<usize, CliError> {
        let available = std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1);
        let threads = match (self.common.threads, self.file.get("threads")) {
            (Some(t), _) => t,
            (None, Some(raw)) => parse_value("threads", raw)?,
            (None, None) => available,
        };
        if threads == 0 {
            return Err(CliError::usage("--threads must be positive"));
        }
        Ok(threads)
    }

    pub fn out(&self) -> Result<Option<PathBuf>, CliError> {
        Ok(match (&self.common.out, self.file.get("out")) {
            (Some(p), _) => Some(p.clone()),
            (None, Some(raw)) => Some(PathBuf::from(raw)),
            (None, None) => None,
        })
    }

    /// Raw config value for command-specific keys.
    pub fn file_value(&self, key: &str) -> Option<&str> {
        self.file.get(key)
    }
}

pub fn kind_name(kind: CouplingKind) -> &'static str {
    match kind {
        CouplingKind::Exact => "exact",
        CouplingKind::Thermo => "thermo",
        CouplingKind::Truncated => "truncated",
        CouplingKind::Direct => "direct",
    }
}
