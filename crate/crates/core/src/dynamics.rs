//! Free-fermion dynamics: each positive quasi-momentum `k` evolves as an
//! independent two-level system driven by the field ramp and the
//! counterdiabatic term `g'(t) q_k(g)`.

use crate::coefficients::{check_chain_len, dispersion_denominator, MomentumGrid};
use crate::integrator::{Dop853, Stats, Tolerances};
use crate::{CouplingModel, Error, Result, Schedule, C64};

/// Mixing angle with `sin θ = sin k / ε` and `cos θ = (g - cos k) / ε`, in `[0, π]`.
pub fn bogoliubov_angle(k: f64, g: f64) -> f64 {
    k.sin().atan2(g - k.cos())
}

/// Ground-state pair amplitudes `(u0, v0) = (cos θ/2, sin θ/2)`.
pub fn gs_amplitudes(k: f64, g: f64) -> (f64, f64) {
    let (s, c) = (0.5 * bogoliubov_angle(k, g)).sin_cos();
    (c, s)
}

/// The orthogonal (doubly excited) pair amplitudes `(-sin θ/2, cos θ/2)`.
pub fn excited_amplitudes(k: f64, g: f64) -> (f64, f64) {
    let (s, c) = (0.5 * bogoliubov_angle(k, g)).sin_cos();
    (-s, c)
}

/// Driving factor of the exact couplings, `sin k / (4 (g^2 - 2g cos k + 1))`.
pub fn q_exact(k: f64, g: f64) -> f64 {
    0.25 * k.sin() / dispersion_denominator(k, g)
}

/// Driving factor of the thermodynamic couplings. The ferromagnetic branch
/// is used for `g < 1` and the paramagnetic one for `g >= 1`.
pub fn q_thermo(k: f64, g: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    if !(g >= 0.0) || !g.is_finite() {
        return Err(Error::invalid(format!(
            "field must be finite and non-negative, got {g}"
        )));
    }
    let half = (chain_len / 2) as i32;
    let den = dispersion_denominator(k, g);
    let tail = (k * half as f64).sin() * (g * g - 1.0) / den;
    let correction = if g < 1.0 {
        g.powi(half - 1) / 8.0 * tail
    } else {
        -g.powi(-half - 1) / 8.0 * tail
    };
    Ok(q_exact(k, g) + correction)
}

/// Weights `w_m` with `q_k = sum_m w_m h_m`: `2 sin(km)` below `N/2` and
/// `sin(kN/2)` for the last coupling.
fn driving_weights(k: f64, chain_len: usize) -> Vec<f64> {
    let half = chain_len / 2;
    (1..=half)
        .map(|m| {
            let s = (k * m as f64).sin();
            if m == half {
                s
            } else {
                2.0 * s
            }
        })
        .collect()
}

/// `q_k = 2 sum_{m<N/2} h_m sin(km) + h_{N/2} sin(kN/2)` from the couplings
/// of `coupling` at field `g`.
pub fn q_from_couplings(k: f64, g: f64, coupling: CouplingModel, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    coupling.validate(chain_len)?;
    let set = coupling.couplings(g, chain_len)?;
    Ok(dot(&driving_weights(k, chain_len), set.values()))
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pair amplitudes `(v_k, u_k)` of one quasi-momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    pub k: f64,
    pub v: C64,
    pub u: C64,
}

impl ModeState {
    pub fn ground(k: f64, g: f64) -> Self {
        let (u, v) = gs_amplitudes(k, g);
        Self {
            k,
            v: C64::new(v, 0.0),
            u: C64::new(u, 0.0),
        }
    }

    pub fn excited(k: f64, g: f64) -> Self {
        let (u, v) = excited_amplitudes(k, g);
        Self {
            k,
            v: C64::new(v, 0.0),
            u: C64::new(u, 0.0),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.u.norm_sqr() + self.v.norm_sqr()
    }

    /// `<GS_k(g)|state>`.
    pub fn ground_overlap(&self, g: f64) -> C64 {
        let (u0, v0) = gs_amplitudes(self.k, g);
        self.u * u0 + self.v * v0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    pub chain_len: usize,
    pub schedule: Schedule,
    pub coupling: CouplingModel,
    pub tolerances: Tolerances,
    /// Number of uniformly spaced samples of the instantaneous probability,
    /// endpoints included. Zero records only the final value.
    pub trace_points: usize,
}

impl ChainConfig {
    pub fn new(chain_len: usize, schedule: Schedule, coupling: CouplingModel) -> Result<Self> {
        let config = Self {
            chain_len,
            schedule,
            coupling,
            tolerances: Tolerances::default(),
            trace_points: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_trace_points(mut self, points: usize) -> Self {
        self.trace_points = points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_chain_len(self.chain_len)?;
        self.coupling.validate(self.chain_len)?;
        Tolerances::new(self.tolerances.rel, self.tolerances.abs)?;
        Ok(())
    }

    /// Sample times of the instantaneous-probability trace.
    pub fn sample_times(&self) -> Vec<f64> {
        let t_final = self.schedule.duration();
        match self.trace_points {
            0 => Vec::new(),
            1 => vec![t_final],
            p => (0..p)
                .map(|j| {
                    if j + 1 == p {
                        t_final
                    } else {
                        t_final * j as f64 / (p - 1) as f64
                    }
                })
                .collect(),
        }
    }
}

/// Outcome of one mode evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRun {
    pub state: ModeState,
    /// Ground-state overlaps `|<GS_k(g(t))|state(t)>|^2` at the sample times.
    pub samples: Vec<f64>,
    pub norm_drift: f64,
    pub stats: Stats,
}

/// Right-hand side of the mode equation for one quasi-momentum.
struct ModeSystem<'a> {
    k_sin: f64,
    k_cos: f64,
    weights: Vec<f64>,
    couplings: Vec<f64>,
    config: &'a ChainConfig,
}

impl<'a> ModeSystem<'a> {
    fn new(k: f64, config: &'a ChainConfig) -> Self {
        let weights = driving_weights(k, config.chain_len);
        let kept = match config.coupling {
            CouplingModel::Truncated { max_range } => max_range.min(weights.len()),
            _ => weights.len(),
        };
        Self {
            k_sin: k.sin(),
            k_cos: k.cos(),
            weights,
            couplings: vec![0.0; kept],
            config,
        }
    }

    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]) {
        let schedule = &self.config.schedule;
        let g = schedule.field_at(t);
        let rate = schedule.rate_at(t);
        let drive = if rate == 0.0 || self.couplings.is_empty() {
            0.0
        } else {
            self.config
                .coupling
                .fill(g, self.config.chain_len, &mut self.couplings);
            rate * dot(&self.weights, &self.couplings)
        };
        let (v, u) = (y[0], y[1]);
        let diag = g - self.k_cos;
        let off = C64::new(-self.k_sin, -drive);
        // -2i H (v, u)
        let hv = v * diag + off * u;
        let hu = off.conj() * v - u * diag;
        dy[0] = C64::new(2.0 * hv.im, -2.0 * hv.re);
        dy[1] = C64::new(2.0 * hu.im, -2.0 * hu.re);
    }
}

/// Evolves the ground pair state of `k` at `g0` through the full ramp.
pub fn evolve_mode(k: f64, config: &ChainConfig) -> Result<ModeRun> {
    evolve_mode_from(ModeState::ground(k, config.schedule.initial()), config)
}

/// Evolves an arbitrary initial pair state through the full ramp. Samples
/// are taken at `config.sample_times()`; the integrator restarts at each.
pub fn evolve_mode_from(initial: ModeState, config: &ChainConfig) -> Result<ModeRun> {
    config.validate()?;
    let k = initial.k;
    if !(k > 0.0 && k < std::f64::consts::PI) {
        return Err(Error::invalid(format!(
            "quasi-momentum {k} outside (0, pi)"
        )));
    }
    let mut system = ModeSystem::new(k, config);
    let mut solver = Dop853::new(2, config.tolerances);
    let mut y = [initial.v, initial.u];
    let norm0 = initial.norm_sqr();
    let mut drift: f64 = 0.0;
    let mut stats = Stats::default();
    let mut samples = Vec::with_capacity(config.trace_points);

    let mut stops = config.sample_times();
    let t_final = config.schedule.duration();
    if stops.last() != Some(&t_final) {
        stops.push(t_final);
    }
    let mut t = 0.0;
    for (i, &stop) in stops.iter().enumerate() {
        if stop > t {
            stats += solver
                .integrate(|t, y, dy| system.eval(t, y, dy), t, stop, &mut y)
                .map_err(|e| e.with_mode(k))?;
            t = stop;
        }
        let state = ModeState {
            k,
            v: y[0],
            u: y[1],
        };
        drift = drift.max((state.norm_sqr() - norm0).abs());
        if i < config.trace_points {
            samples.push(
                state
                    .ground_overlap(config.schedule.field_at(stop))
                    .norm_sqr(),
            );
        }
    }

    Ok(ModeRun {
        state: ModeState {
            k,
            v: y[0],
            u: y[1],
        },
        samples,
        norm_drift: drift,
        stats,
    })
}

/// `prod_k |cos(θ_k/2) u_k + sin(θ_k/2) v_k|^2` with one state per grid momentum.
pub fn ground_state_probability(states: &[ModeState], g: f64) -> Result<f64> {
    if states.is_empty() {
        return Err(Error::invalid("no mode states supplied"));
    }
    let grid = MomentumGrid::new(2 * states.len())?;
    for (state, k) in states.iter().zip(grid.iter()) {
        if (state.k - k).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "mode states do not cover the momentum grid of N = {}: expected k = {k}, got {}",
                grid.chain_len(),
                state.k
            )));
        }
    }
    Ok(states
        .iter()
        .map(|s| s.ground_overlap(g).norm_sqr())
        .product())
}

/// One sample of the instantaneous ground-state probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub g: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub p_gs: f64,
    pub trace: Option<Vec<TracePoint>>,
    /// Largest `| |u|^2 + |v|^2 - 1 |` over all modes and sample times.
    pub norm_drift: f64,
    pub stats: Stats,
}

/// Evolves every mode of the chain and multiplies the final overlaps in grid order.
pub fn evolve_chain(config: &ChainConfig) -> Result<EvolutionResult> {
    config.validate()?;
    let grid = MomentumGrid::new(config.chain_len)?;
    let runs = grid
        .iter()
        .map(|k| evolve_mode(k, config))
        .collect::<Result<Vec<_>>>()?;
    assemble(config, &runs)
}

/// Combines per-mode runs (ordered as the momentum grid) into a chain result.
pub fn assemble(config: &ChainConfig, runs: &[ModeRun]) -> Result<EvolutionResult> {
    let states: Vec<ModeState> = runs.iter().map(|r| r.state).collect();
    let p_gs = ground_state_probability(&states, config.schedule.target())?;
    let mut stats = Stats::default();
    let mut drift: f64 = 0.0;
    for run in runs {
        stats += run.stats;
        drift = drift.max(run.norm_drift);
    }
    let trace = (config.trace_points > 0).then(|| {
        config
            .sample_times()
            .into_iter()
            .enumerate()
            .map(|(i, t)| TracePoint {
                t,
                g: config.schedule.field_at(t),
                probability: runs.iter().map(|r| r.samples[i]).product(),
            })
            .collect()
    });
    Ok(EvolutionResult {
        p_gs,
        trace,
        norm_drift: drift,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

    #[test]
    fn angle_examples() {
        assert_relative_eq!(bogoliubov_angle(FRAC_PI_2, 0.0), FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(bogoliubov_angle(FRAC_PI_2, 1.0), FRAC_PI_4, epsilon = 1e-15);
        assert!(bogoliubov_angle(1.0, 1e8) < 1e-7);
        let (u, v) = gs_amplitudes(FRAC_PI_2, 1.0);
        assert_relative_eq!(u, FRAC_PI_8.cos(), epsilon = 1e-15);
        assert_relative_eq!(v, FRAC_PI_8.sin(), epsilon = 1e-15);
        let (u, v) = gs_amplitudes(0.3, 1e9);
        assert!((u - 1.0).abs() < 1e-15 && v.abs() < 1e-9);
    }

    #[test]
    fn q_examples() {
        assert_relative_eq!(q_exact(FRAC_PI_2, 1.0), 0.125, epsilon = 1e-16);
        assert_relative_eq!(q_exact(0.7, 0.0), 0.7f64.sin() / 4.0, epsilon = 1e-16);
        assert!(q_exact(0.7, 1e6) < 1e-12);
        assert_eq!(q_thermo(0.9, 1.0, 10).unwrap(), q_exact(0.9, 1.0));
        // pi/2 is not on the N = 20 grid; its neighbours are
        for k in [9.0 * PI / 20.0, 11.0 * PI / 20.0] {
            let resummed = q_from_couplings(k, 0.9, CouplingModel::Thermodynamic, 20).unwrap();
            assert!((resummed - q_thermo(k, 0.9, 20).unwrap()).abs() < 1e-12);
        }
        let k = FRAC_PI_2;
        let zero = q_from_couplings(k, 0.9, CouplingModel::Truncated { max_range: 0 }, 20).unwrap();
        assert_eq!(zero, 0.0);
        // exponential suppression of the finite-size correction
        assert!((q_thermo(0.3, 0.5, 200).unwrap() - q_exact(0.3, 0.5)).abs() < 1e-30);
    }

    #[test]
    fn probability_examples() {
        let grid = MomentumGrid::new(6).unwrap();
        let mut states: Vec<ModeState> = grid.iter().map(|k| ModeState::ground(k, 0.7)).collect();
        assert_relative_eq!(
            ground_state_probability(&states, 0.7).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        states[1] = ModeState::excited(states[1].k, 0.7);
        assert!(ground_state_probability(&states, 0.7).unwrap() < 1e-30);
        assert!(ground_state_probability(&states[..2], 0.7).is_err());
        assert!(ground_state_probability(&[], 0.7).is_err());
    }

    #[test]
    fn constant_field_is_stationary() {
        let schedule = Schedule::new(0.6, 0.6, 5.0).unwrap();
        let config = ChainConfig::new(8, schedule, CouplingModel::ExactClosed)
            .unwrap()
            .with_trace_points(11);
        let result = evolve_chain(&config).unwrap();
        for p in result.trace.unwrap() {
            assert!((p.probability - 1.0).abs() < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn exact_driving_is_perfect() {
        for (n, t) in [(4, 1.0), (10, 1.0), (10, 10.0)] {
            let schedule = Schedule::new(5.0, 0.0, t).unwrap();
            let config = ChainConfig::new(n, schedule, CouplingModel::ExactClosed).unwrap();
            let result = evolve_chain(&config).unwrap();
            assert!(
                (result.p_gs - 1.0).abs() < 1e-9,
                "N={n} T={t}: {}",
                result.p_gs
            );
            assert!(result.norm_drift < 1e-9);
        }
    }

    #[test]
    fn full_truncation_matches_exact_bitwise() {
        let schedule = Schedule::new(5.0, 0.0, 2.0).unwrap();
        let exact = ChainConfig::new(12, schedule, CouplingModel::ExactClosed).unwrap();
        let full =
            ChainConfig::new(12, schedule, CouplingModel::Truncated { max_range: 6 }).unwrap();
        assert_eq!(evolve_chain(&exact).unwrap(), evolve_chain(&full).unwrap());
    }

    #[test]
    fn no_driving_loses_probability() {
        let schedule = Schedule::new(5.0, 0.0, 1.0).unwrap();
        let config =
            ChainConfig::new(10, schedule, CouplingModel::Truncated { max_range: 0 }).unwrap();
        assert!(evolve_chain(&config).unwrap().p_gs < 0.5);
    }

    #[test]
    fn excited_state_is_also_followed() {
        let schedule = Schedule::new(5.0, 0.0, 1.0).unwrap();
        let config = ChainConfig::new(10, schedule, CouplingModel::ExactClosed).unwrap();
        for k in MomentumGrid::new(10).unwrap().iter() {
            let run = evolve_mode_from(ModeState::excited(k, 5.0), &config).unwrap();
            let (u, v) = excited_amplitudes(k, 0.0);
            let overlap = run.state.u * u + run.state.v * v;
            assert!((overlap.norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trace_starts_at_one_and_ends_at_p_gs() {
        let schedule = Schedule::new(5.0, 0.0, 3.0).unwrap();
        let config = ChainConfig::new(20, schedule, CouplingModel::Thermodynamic)
            .unwrap()
            .with_trace_points(7);
        let result = evolve_chain(&config).unwrap();
        let trace = result.trace.unwrap();
        assert_eq!(trace.len(), 7);
        assert_eq!(trace[0].t, 0.0);
        assert_eq!(trace[6].t, 3.0);
        assert!((trace[0].probability - 1.0).abs() < 1e-15);
        assert_eq!(trace[6].probability, result.p_gs);
        assert!(trace.windows(2).all(|w| w[0].t < w[1].t));
    }

    #[test]
    fn bad_momentum_is_rejected() {
        let schedule = Schedule::new(5.0, 0.0, 1.0).unwrap();
        let config = ChainConfig::new(4, schedule, CouplingModel::ExactClosed).unwrap();
        let bad = ModeState {
            k: 4.0,
            v: C64::new(0.0, 0.0),
            u: C64::new(1.0, 0.0),
        };
        assert!(evolve_mode_from(bad, &config).is_err());
    }
}
