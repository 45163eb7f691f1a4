use cdising::coefficients::{h_closed, h_thermo};
use cdising::dynamics::evolve_chain;
use cdising::{ChainConfig, CouplingModel, Schedule};

/// Largest chain the page accepts; keeps each click well under a second.
pub const MAX_DEMO_SPINS: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub exact: Vec<f64>,
    pub thermo: Vec<f64>,
}

fn check_size(n: usize) -> Result<(), String> {
    if n > MAX_DEMO_SPINS {
        return Err(format!("the demo is limited to N <= {MAX_DEMO_SPINS}"));
    }
    Ok(())
}

pub fn coupling_profile(n: usize, g: f64) -> Result<Profile, String> {
    check_size(n)?;
    let mut exact = Vec::with_capacity(n / 2);
    let mut thermo = Vec::with_capacity(n / 2);
    for m in 1..=n / 2 {
        exact.push(h_closed(m, g, n).map_err(|e| e.to_string())?);
        thermo.push(h_thermo(m, g).map_err(|e| e.to_string())?);
    }
    Ok(Profile { exact, thermo })
}

pub fn truncation_curve(n: usize, t_final: f64, g0: f64, gf: f64) -> Result<Vec<f64>, String> {
    check_size(n)?;
    let schedule = Schedule::new(g0, gf, t_final).map_err(|e| e.to_string())?;
    (0..=n / 2)
        .map(|m| {
            let config = ChainConfig::new(n, schedule, CouplingModel::Truncated { max_range: m })
                .map_err(|e| e.to_string())?;
            evolve_chain(&config)
                .map(|r| r.p_gs)
                .map_err(|e| e.to_string())
        })
        .collect()
}

fn parse_coupling(name: &str) -> Result<CouplingModel, String> {
    match name {
        "exact" => Ok(CouplingModel::ExactClosed),
        "thermo" => Ok(CouplingModel::Thermodynamic),
        "none" => Ok(CouplingModel::Truncated { max_range: 0 }),
        other => match other.strip_prefix("truncated:") {
            Some(m) => m
                .parse()
                .map(|max_range| CouplingModel::Truncated { max_range })
                .map_err(|_| format!("bad truncation range `{m}`")),
            None => Err(format!("unknown coupling `{other}`")),
        },
    }
}

/// `(g, p)` pairs at `samples` evenly spaced times.
pub fn instant_trace(
    n: usize,
    t_final: f64,
    g0: f64,
    gf: f64,
    coupling: &str,
    samples: usize,
) -> Result<Vec<(f64, f64)>, String> {
    check_size(n)?;
    if samples == 0 {
        return Err("at least one sample is needed".into());
    }
    let schedule = Schedule::new(g0, gf, t_final).map_err(|e| e.to_string())?;
    let config = ChainConfig::new(n, schedule, parse_coupling(coupling)?)
        .map_err(|e| e.to_string())?
        .with_trace_points(samples);
    let result = evolve_chain(&config).map_err(|e| e.to_string())?;
    Ok(result
        .trace
        .unwrap_or_default()
        .into_iter()
        .map(|p| (p.g, p.probability))
        .collect())
}
