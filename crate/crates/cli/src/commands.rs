use cdising::coefficients::{h_closed, h_sum, h_thermo, h_truncated};
use cdising::spin::{dense_evolve_pgs, MAX_SPINS};
use cdising::{ChainConfig, CouplingModel, Schedule};

use crate::cli::{CoeffsArgs, CommonArgs, CouplingKind, TraceArgs};
use crate::error::{CliError, Context};
use crate::output::{float, Table};
use crate::params::{kind_name, Resolver};
use crate::runner::{evolve_labelled, map_ordered, pool};

/// Result of a command: the table plus an optional verification verdict.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<String>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self {
            table,
            failure: None,
        }
    }
}

pub const TRUNCATION_SIZES: [usize; 6] = [10, 30, 50, 70, 100, 200];
pub const SIZE_TIMES: [f64; 3] = [1.0, 10.0, 100.0];
pub const ORACLE_SIZES: [usize; 4] = [2, 4, 6, 8];
pub const ORACLE_TIMES: [f64; 2] = [1.0, 10.0];
pub const ORACLE_TOLERANCE: f64 = 1e-6;

pub fn default_size_sweep() -> Vec<usize> {
    (1..=20).map(|i| 10 * i).collect()
}

fn schedule(g0: f64, gf: f64, t: f64) -> Result<Schedule, CliError> {
    Schedule::new(g0, gf, t).map_err(|e| CliError::usage(e.to_string()))
}

fn m_label(model: CouplingModel) -> String {
    match model {
        CouplingModel::Truncated { max_range } => max_range.to_string(),
        _ => String::new(),
    }
}

pub fn coeffs(args: &CoeffsArgs, r: &mut Resolver) -> Result<Outcome, CliError> {
    let n = r.single_n(200)?;
    let g = r.scalar("g", args.g, 0.95)?;
    let kind = r.coupling_kind(CouplingKind::Exact)?;
    let m_max = r.m_max()?;
    Resolver::model(kind, m_max, n)?;
    let mut table = Table::new(&["m", "h_m"]);
    for m in 1..=n / 2 {
        let h = match kind {
            CouplingKind::Exact => h_closed(m, g, n),
            CouplingKind::Direct => h_sum(m as i64, g, n),
            CouplingKind::Thermo => h_thermo(m, g),
            CouplingKind::Truncated => h_truncated(m, g, n, m_max.unwrap_or(0)),
        }
        .map_err(|e| CliError::usage(e.to_string()))?;
        table.push(vec![m.to_string(), float(h)]);
    }
    Ok(table.into())
}

pub fn sweep_truncation(r: &mut Resolver) -> Result<Outcome, CliError> {
    let ns = r.ns(&TRUNCATION_SIZES)?;
    let t = r.single_t(10.0)?;
    let (g0, gf) = (r.g0()?, r.gf()?);
    let m_cap = r.m_max()?;
    let tol = r.tolerances()?;
    let pool = pool(r.threads()?)?;
    let sched = schedule(g0, gf, t)?;

    let mut jobs = Vec::new();
    for &n in &ns {
        Resolver::model(CouplingKind::Exact, None, n)?;
        let top = m_cap.map_or(n / 2, |c| c.min(n / 2));
        jobs.extend((0..=top).map(|m| (n, m)));
    }
    let results = map_ordered(&pool, &jobs, |&(n, m)| {
        let config = ChainConfig::new(n, sched, CouplingModel::Truncated { max_range: m })
            .map_err(|e| CliError::usage(e.to_string()))?
            .with_tolerances(tol);
        evolve_labelled(&config, || format!("N = {n}, M = {m}"))
    })?;
    let mut table = Table::new(&["N", "M", "p_GS"]);
    for (&(n, m), res) in jobs.iter().zip(&results) {
        table.push(vec![n.to_string(), m.to_string(), float(res.p_gs)]);
    }
    Ok(table.into())
}

pub fn sweep_size(r: &mut Resolver) -> Result<Outcome, CliError> {
    let ns = r.ns(&default_size_sweep())?;
    let ts = r.ts(&SIZE_TIMES)?;
    let (g0, gf) = (r.g0()?, r.gf()?);
    let kind = r.coupling_kind(CouplingKind::Thermo)?;
    let m_max = r.m_max()?;
    let tol = r.tolerances()?;
    let pool = pool(r.threads()?)?;

    let mut jobs = Vec::new();
    for &n in &ns {
        let model = Resolver::model(kind, m_max, n)?;
        for &t in &ts {
            jobs.push((n, t, model, schedule(g0, gf, t)?));
        }
    }
    let results = map_ordered(&pool, &jobs, |&(n, t, model, sched)| {
        let config = ChainConfig::new(n, sched, model)
            .map_err(|e| CliError::usage(e.to_string()))?
            .with_tolerances(tol);
        evolve_labelled(&config, || format!("N = {n}, T = {t}"))
    })?;
    let mut table = Table::new(&["N", "T", "p_GS"]);
    for (&(n, t, _, _), res) in jobs.iter().zip(&results) {
        table.push(vec![n.to_string(), float(t), float(res.p_gs)]);
    }
    Ok(table.into())
}

pub fn trace(args: &TraceArgs, r: &mut Resolver) -> Result<Outcome, CliError> {
    let n = r.single_n(200)?;
    let t = r.single_t(10.0)?;
    let (g0, gf) = (r.g0()?, r.gf()?);
    let kind = r.coupling_kind(CouplingKind::Thermo)?;
    let m_max = r.m_max()?;
    let samples = r.scalar("samples", args.samples, 500)?;
    let tol = r.tolerances()?;
    let pool = pool(r.threads()?)?;
    if samples == 0 {
        return Err(CliError::usage("--samples must be positive"));
    }
    let model = Resolver::model(kind, m_max, n)?;
    let config = ChainConfig::new(n, schedule(g0, gf, t)?, model)
        .map_err(|e| CliError::usage(e.to_string()))?
        .with_tolerances(tol)
        .with_trace_points(samples);
    let result = pool.install(|| evolve_labelled(&config, || format!("N = {n}, T = {t}")))?;
    let mut table = Table::new(&["t", "g", "p_instant"]);
    for point in result.trace.unwrap_or_default() {
        table.push(vec![
            float(point.t),
            float(point.g),
            float(point.probability),
        ]);
    }
    Ok(table.into())
}

pub fn evolve(r: &mut Resolver) -> Result<Outcome, CliError> {
    let n = r.single_n(100)?;
    let t = r.single_t(10.0)?;
    let (g0, gf) = (r.g0()?, r.gf()?);
    let kind = r.coupling_kind(CouplingKind::Exact)?;
    let m_max = r.m_max()?;
    let tol = r.tolerances()?;
    let pool = pool(r.threads()?)?;
    let model = Resolver::model(kind, m_max, n)?;
    let config = ChainConfig::new(n, schedule(g0, gf, t)?, model)
        .map_err(|e| CliError::usage(e.to_string()))?
        .with_tolerances(tol);
    let res = pool.install(|| evolve_labelled(&config, || format!("N = {n}, T = {t}")))?;
    let mut table = Table::new(&[
        "N",
        "coupling",
        "M",
        "g0",
        "gf",
        "T",
        "p_GS",
        "norm_drift",
        "accepted_steps",
        "rejected_steps",
    ]);
    table.push(vec![
        n.to_string(),
        kind_name(kind).to_string(),
        m_label(model),
        float(g0),
        float(gf),
        float(t),
        float(res.p_gs),
        float(res.norm_drift),
        res.stats.accepted.to_string(),
        res.stats.rejected.to_string(),
    ]);
    Ok(table.into())
}

/// Every coupling variant for chain length `n`: exact, direct, thermo and
/// each truncation range.
fn all_models(n: usize) -> Vec<(CouplingKind, CouplingModel)> {
    let mut models = vec![
        (CouplingKind::Exact, CouplingModel::ExactClosed),
        (CouplingKind::Direct, CouplingModel::DirectSum),
        (CouplingKind::Thermo, CouplingModel::Thermodynamic),
    ];
    models.extend((0..=n / 2).map(|m| {
        (
            CouplingKind::Truncated,
            CouplingModel::Truncated { max_range: m },
        )
    }));
    models
}

pub fn oracle(args: &CommonArgs, r: &mut Resolver) -> Result<Outcome, CliError> {
    let ns = r.ns(&ORACLE_SIZES)?;
    let ts = r.ts(&ORACLE_TIMES)?;
    let (g0, gf) = (r.g0()?, r.gf()?);
    let chosen = match args.coupling.is_some() || r.file_value("coupling").is_some() {
        true => Some(r.coupling_kind(CouplingKind::Exact)?),
        false => None,
    };
    let m_max = r.m_max()?;
    let tol = r.tolerances()?;
    let pool = pool(r.threads()?)?;

    let mut jobs = Vec::new();
    for &n in &ns {
        if n > MAX_SPINS {
            return Err(CliError::usage(format!(
                "oracle runs need N <= {MAX_SPINS}, got {n}"
            )));
        }
        let models = match chosen {
            Some(kind) => vec![(kind, Resolver::model(kind, m_max, n)?)],
            None => all_models(n),
        };
        for (kind, model) in models {
            for &t in &ts {
                jobs.push((n, kind, model, t, schedule(g0, gf, t)?));
            }
        }
    }
    let results = map_ordered(&pool, &jobs, |&(n, _, model, t, sched)| {
        let label = || format!("N = {n}, {model}, T = {t}");
        let config = ChainConfig::new(n, sched, model)
            .map_err(|e| CliError::usage(e.to_string()))?
            .with_tolerances(tol);
        let fermion = evolve_labelled(&config, label)?.p_gs;
        let dense = dense_evolve_pgs(n, &sched, model, tol).context(label)?;
        Ok((fermion, dense))
    })?;

    let mut table = Table::new(&[
        "N",
        "coupling",
        "M",
        "T",
        "p_fermion",
        "p_dense",
        "abs_diff",
    ]);
    let mut worst: Option<(f64, String)> = None;
    for (&(n, kind, model, t, _), &(fermion, dense)) in jobs.iter().zip(&results) {
        let diff = (fermion - dense).abs();
        table.push(vec![
            n.to_string(),
            kind_name(kind).to_string(),
            m_label(model),
            float(t),
            float(fermion),
            float(dense),
            float(diff),
        ]);
        if diff > ORACLE_TOLERANCE && worst.as_ref().is_none_or(|(w, _)| diff > *w) {
            worst = Some((
                diff,
                format!("N = {n}, {model}, T = {t}: |p_fermion - p_dense| = {diff:.3e}"),
            ));
        }
    }
    Ok(Outcome {
        table,
        failure: worst.map(|(_, msg)| msg),
    })
}
