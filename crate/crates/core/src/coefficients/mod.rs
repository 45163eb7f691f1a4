//! Counterdiabatic couplings `h_m(g)` of the periodic Ising chain.
//!
//! Every coefficient family comes in two flavours: a closed form that is cheap
//! and numerically stable over the whole field range `g >= 0`, and a direct sum
//! over the positive quasi-momenta that serves as an independent reference.
//!
//! The closed forms are evaluated in the ferromagnetic range `g <= 1` and mapped
//! to `g > 1` through the duality `h_m(g) = h_m(1/g) / g^2` (the same relation
//! holds for `f_m`), which keeps `g^N` bounded.

mod appendix;
mod identities;

pub use appendix::{
    binomial_moment, expansion_a, expansion_a_exact, expansion_b, expansion_b_exact, f_appendix,
    h_appendix, moment_sum, reconstruct_exact, w_closed, w_sum, APPENDIX_ROUNDING_LIMIT,
    MAX_EXPANSION_ORDER,
};
pub use identities::{
    cos_sum, delta_m, ryzhik_closed, ryzhik_sum, verify_identities, Identity, IdentityReport,
    IdentityResidual, IDENTITY_TOLERANCE,
};

use std::f64::consts::PI;
use std::fmt;

use crate::{Error, Result};

/// Positive quasi-momenta `k = pi/N, 3pi/N, ..., pi - pi/N` of the even-parity
/// sector of an `N`-site chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    chain_len: usize,
    values: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(chain_len: usize) -> Result<Self> {
        check_chain_len(chain_len)?;
        let values = (0..chain_len / 2)
            .map(|j| grid_momentum(j, chain_len))
            .collect();
        Ok(Self { chain_len, values })
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}

pub fn momentum_grid(chain_len: usize) -> Result<MomentumGrid> {
    MomentumGrid::new(chain_len)
}

#[inline]
pub(crate) fn grid_momentum(j: usize, chain_len: usize) -> f64 {
    (2 * j + 1) as f64 * PI / chain_len as f64
}

/// `m k_j` reduced modulo `2 pi` in integer arithmetic, so large `|m|` adds
/// no phase error.
#[inline]
pub(crate) fn grid_phase(m: i64, j: usize, chain_len: usize) -> f64 {
    let turns = (i128::from(m) * (2 * j + 1) as i128).rem_euclid(2 * chain_len as i128);
    turns as f64 * PI / chain_len as f64
}

pub(crate) fn check_chain_len(chain_len: usize) -> Result<()> {
    if chain_len < 2 || chain_len % 2 != 0 {
        return Err(Error::invalid(format!(
            "chain length must be even and at least 2, got {chain_len}"
        )));
    }
    Ok(())
}

fn check_field(g: f64) -> Result<()> {
    if !g.is_finite() || g < 0.0 {
        return Err(Error::invalid(format!(
            "field must be finite and non-negative, got {g}"
        )));
    }
    Ok(())
}

fn check_range_index(m: usize, chain_len: usize) -> Result<()> {
    if m >= chain_len {
        return Err(Error::invalid(format!(
            "range index m = {m} outside [0, {}] for N = {chain_len}",
            chain_len - 1
        )));
    }
    Ok(())
}

/// `g^2 - 2 g cos k + 1`, written as `(g - 1)^2 + 4 g sin^2(k/2)` so that it
/// keeps full relative precision near `g = 1`, `k -> 0`.
#[inline]
pub fn dispersion_denominator(k: f64, g: f64) -> f64 {
    let s = (0.5 * k).sin();
    (g - 1.0) * (g - 1.0) + 4.0 * g * s * s
}

/// Exact coupling `h_m(g)` for `m in [0, N-1]`.
///
/// Uses `(g^{m-1} + g^{N-m-1}) / (8 (1 + g^N))` for `g <= 1` and the duality
/// mapping above. `h_0 = 0` and `h_m(1) = 1/8` exactly.
pub fn h_closed(m: usize, g: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    check_field(g)?;
    check_range_index(m, chain_len)?;
    Ok(h_closed_unchecked(m, g, chain_len))
}

pub(crate) fn h_closed_unchecked(m: usize, g: f64, chain_len: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    if g > 1.0 {
        let inv = 1.0 / g;
        return h_closed_unchecked(m, inv, chain_len) * inv * inv;
    }
    let n = chain_len as i32;
    let m = m as i32;
    (g.powi(m - 1) + g.powi(n - m - 1)) / (8.0 * (1.0 + g.powi(n)))
}

/// `h_m(g)` by direct summation over the momentum grid. Accepts any integer
/// `m` and any real `g`, including negative fields.
pub fn h_sum(m: i64, g: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    let total: f64 = (0..chain_len / 2)
        .map(|j| {
            let k = grid_momentum(j, chain_len);
            k.sin() * grid_phase(m, j, chain_len).sin() / dispersion_denominator(k, g)
        })
        .sum();
    Ok(total / (2.0 * chain_len as f64))
}

/// Closed form of the auxiliary sum `f_m(g)` for `m in [0, N-1]`.
///
/// At `g = 1` the removable singularity is replaced by its limit `(N - 2m)/16`.
pub fn f_closed(m: usize, g: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    check_field(g)?;
    check_range_index(m, chain_len)?;
    Ok(f_closed_unchecked(m, g, chain_len))
}

pub(crate) fn f_closed_unchecked(m: usize, g: f64, chain_len: usize) -> f64 {
    let n = chain_len as i32;
    let mi = m as i32;
    if g == 1.0 {
        return f64::from(n - 2 * mi) / 16.0;
    }
    if g > 1.0 {
        let inv = 1.0 / g;
        return f_closed_unchecked(m, inv, chain_len) * inv * inv;
    }
    if g == 0.0 {
        return if m == 0 { 0.25 } else { 0.0 };
    }
    let denom = 4.0 * (g.powi(n) + 1.0);
    if g < 0.5 {
        (g.powi(n - mi) - g.powi(mi)) / (denom * (g * g - 1.0))
    } else {
        // g^{N-m} - g^m = g^m expm1((N - 2m) ln g), free of cancellation near g = 1
        let log_g = (g - 1.0).ln_1p();
        g.powi(mi) * (f64::from(n - 2 * mi) * log_g).exp_m1() / (denom * (g - 1.0) * (g + 1.0))
    }
}

/// `f_m(g)` by direct summation over the momentum grid.
pub fn f_sum(m: i64, g: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    let total: f64 = (0..chain_len / 2)
        .map(|j| {
            let k = grid_momentum(j, chain_len);
            grid_phase(m, j, chain_len).cos() / dispersion_denominator(k, g)
        })
        .sum();
    Ok(total / (2.0 * chain_len as f64))
}

/// Thermodynamic-limit coupling: `g^{m-1}/8` below the critical point and
/// `g^{-m-1}/8` at and above it.
pub fn h_thermo(m: usize, g: f64) -> Result<f64> {
    check_field(g)?;
    if m == 0 {
        return Err(Error::invalid("thermodynamic coupling defined for m >= 1"));
    }
    Ok(h_thermo_unchecked(m, g))
}

#[inline]
fn h_thermo_unchecked(m: usize, g: f64) -> f64 {
    let m = m as i32;
    if g < 1.0 {
        g.powi(m - 1) / 8.0
    } else {
        g.powi(-m - 1) / 8.0
    }
}

/// Exact coupling kept only up to range `max_range`.
pub fn h_truncated(m: usize, g: f64, chain_len: usize, max_range: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    check_field(g)?;
    if max_range > chain_len / 2 {
        return Err(Error::invalid(format!(
            "truncation range M = {max_range} exceeds N/2 = {}",
            chain_len / 2
        )));
    }
    if m == 0 || m > chain_len / 2 {
        return Err(Error::invalid(format!(
            "range index m = {m} outside [1, N/2]"
        )));
    }
    Ok(if m <= max_range {
        h_closed_unchecked(m, g, chain_len)
    } else {
        0.0
    })
}

/// Field in `(0, g_max]` where `h_m(g)` peaks, with the peak value.
///
/// A uniform scan locates the bracketing cell, then golden-section search
/// refines it to about `1e-12` in `g`.
pub fn h_peak(m: usize, chain_len: usize, g_max: f64) -> Result<(f64, f64)> {
    check_chain_len(chain_len)?;
    if m == 0 || m >= chain_len {
        return Err(Error::invalid(format!(
            "range index m = {m} outside [1, N-1]"
        )));
    }
    if !(g_max > 0.0) || !g_max.is_finite() {
        return Err(Error::invalid(format!(
            "search interval (0, {g_max}] is empty"
        )));
    }
    const CELLS: usize = 4000;
    let step = g_max / CELLS as f64;
    let h = |g: f64| h_closed_unchecked(m, g, chain_len);
    let best = (1..=CELLS)
        .map(|i| i as f64 * step)
        .max_by(|&a, &b| h(a).total_cmp(&h(b)))
        .unwrap_or(g_max);
    let (mut lo, mut hi) = ((best - step).max(step * 1e-6), (best + step).min(g_max));
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    while hi - lo > 1e-12 {
        if h(a) < h(b) {
            lo = a;
            a = b;
            b = lo + ratio * (hi - lo);
        } else {
            hi = b;
            b = a;
            a = hi - ratio * (hi - lo);
        }
    }
    let g = 0.5 * (lo + hi);
    Ok((g, h(g)))
}

/// Correlation length `1/|ln g|` in lattice units.
pub fn correlation_length(g: f64) -> Result<f64> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::invalid(format!(
            "correlation length needs 0 < g < inf, got {g}"
        )));
    }
    if g == 1.0 {
        return Err(Error::Divergence);
    }
    Ok(1.0 / g.ln().abs())
}

/// Which family of coefficients feeds the counterdiabatic term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CouplingModel {
    /// Closed-form exact couplings.
    ExactClosed,
    /// Exact couplings evaluated by direct momentum sums.
    DirectSum,
    /// Thermodynamic-limit approximation.
    Thermodynamic,
    /// Exact couplings for `m <= max_range`, zero beyond.
    Truncated { max_range: usize },
}

impl CouplingModel {
    pub fn validate(&self, chain_len: usize) -> Result<()> {
        check_chain_len(chain_len)?;
        if let CouplingModel::Truncated { max_range } = *self {
            if max_range > chain_len / 2 {
                return Err(Error::invalid(format!(
                    "truncation range M = {max_range} exceeds N/2 = {}",
                    chain_len / 2
                )));
            }
        }
        Ok(())
    }

    /// Short name used on the command line.
    pub fn name(&self) -> &'static str {
        match self {
            CouplingModel::ExactClosed => "exact",
            CouplingModel::DirectSum => "direct",
            CouplingModel::Thermodynamic => "thermo",
            CouplingModel::Truncated { .. } => "truncated",
        }
    }

    /// Couplings `h_1 ... h_{N/2}` at field `g`.
    pub fn couplings(&self, g: f64, chain_len: usize) -> Result<CouplingSet> {
        self.validate(chain_len)?;
        check_field(g)?;
        let mut values = vec![0.0; chain_len / 2];
        self.fill(g, chain_len, &mut values);
        Ok(CouplingSet {
            g,
            chain_len,
            values,
        })
    }

    /// Writes `h_m` into `out[m - 1]` for `m = 1 ..= out.len()`. No validation;
    /// this sits on the integrator's hot path.
    pub(crate) fn fill(&self, g: f64, chain_len: usize, out: &mut [f64]) {
        match *self {
            CouplingModel::ExactClosed => fill_exact(g, chain_len, out),
            CouplingModel::Truncated { max_range } => {
                let kept = max_range.min(out.len());
                fill_exact(g, chain_len, &mut out[..kept]);
                out[kept..].iter_mut().for_each(|h| *h = 0.0);
            }
            CouplingModel::Thermodynamic => {
                if g < 1.0 {
                    let mut p = 1.0;
                    for h in out.iter_mut() {
                        *h = p / 8.0;
                        p *= g;
                    }
                } else {
                    let inv = 1.0 / g;
                    let mut p = inv * inv;
                    for h in out.iter_mut() {
                        *h = p / 8.0;
                        p *= inv;
                    }
                }
            }
            CouplingModel::DirectSum => {
                for (i, h) in out.iter_mut().enumerate() {
                    *h = h_sum(i as i64 + 1, g, chain_len).unwrap_or(f64::NAN);
                }
            }
        }
    }
}

impl fmt::Display for CouplingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingModel::Truncated { max_range } => write!(f, "truncated(M={max_range})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Exact couplings from iterated powers; agrees with [`h_closed`] to a few ulps.
/// Allocation-free since it runs at every integrator stage.
fn fill_exact(g: f64, chain_len: usize, out: &mut [f64]) {
    let len = out.len();
    if len == 0 {
        return;
    }
    let (base, post) = if g > 1.0 {
        let inv = 1.0 / g;
        (inv, inv * inv)
    } else {
        (g, 1.0)
    };
    let n = chain_len as i32;
    let scale = post / (8.0 * (1.0 + base.powi(n)));
    // base^{m-1}, ascending
    let mut p = 1.0;
    for h in out.iter_mut() {
        *h = p;
        p *= base;
    }
    // base^{N-m-1}, walking m downwards from len
    let mut q = base.powi(n - len as i32 - 1);
    for h in out.iter_mut().rev() {
        *h = (*h + q) * scale;
        q *= base;
    }
}

/// Coupling strengths `h_1 ... h_{N/2}` at a single field value.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSet {
    g: f64,
    chain_len: usize,
    values: Vec<f64>,
}

impl CouplingSet {
    pub fn field(&self) -> f64 {
        self.g
    }

    pub fn chain_len(&self) -> usize {
        self.chain_len
    }

    /// `values()[m - 1]` is `h_m`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, m: usize) -> Option<f64> {
        m.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_small_sizes() {
        assert_eq!(momentum_grid(2).unwrap().values(), &[PI / 2.0]);
        let g4 = momentum_grid(4).unwrap();
        assert_relative_eq!(g4.values()[0], PI / 4.0);
        assert_relative_eq!(g4.values()[1], 3.0 * PI / 4.0);
        let g10 = momentum_grid(10).unwrap();
        assert_eq!(g10.len(), 5);
        assert_relative_eq!(g10.values()[4], 9.0 * PI / 10.0);
        for w in g10.values().windows(2) {
            assert_relative_eq!(w[1] - w[0], 2.0 * PI / 10.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn grid_rejects_bad_lengths() {
        for n in [0, 1, 3, 7] {
            assert!(matches!(momentum_grid(n), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn h_closed_examples() {
        assert_eq!(h_closed(0, 2.0, 8).unwrap(), 0.0);
        assert_eq!(h_closed(3, 1.0, 20).unwrap(), 0.125);
        assert_relative_eq!(h_closed(1, 2.0, 2).unwrap(), 0.05, epsilon = 1e-15);
        // direct sum over k = pi/4, 3pi/4 with g = 1/2
        assert_relative_eq!(
            h_closed(1, 0.5, 4).unwrap(),
            0.3125 / 2.125,
            epsilon = 1e-15
        );
        assert!(h_closed(8, 0.5, 8).is_err());
        assert!(h_closed(1, -0.5, 8).is_err());
    }

    #[test]
    fn h_sum_examples() {
        assert_relative_eq!(h_sum(1, 0.0, 4).unwrap(), 0.125, epsilon = 1e-16);
        assert_eq!(h_sum(0, 0.7, 12).unwrap(), 0.0);
        assert_relative_eq!(h_sum(1, 2.0, 2).unwrap(), 0.05, epsilon = 1e-16);
        assert_relative_eq!(h_sum(1, 0.5, 4).unwrap(), 0.3125 / 2.125, epsilon = 1e-15);
    }

    #[test]
    fn f_examples() {
        assert_relative_eq!(f_closed(0, 2.0, 2).unwrap(), 0.05, epsilon = 1e-15);
        assert_relative_eq!(f_sum(0, 2.0, 2).unwrap(), 0.05, epsilon = 1e-16);
        assert_eq!(f_closed(0, 1.0, 2).unwrap(), 0.125);
        assert_relative_eq!(f_sum(0, 1.0, 2).unwrap(), 0.125, epsilon = 1e-16);
        assert_eq!(f_closed(0, 0.0, 6).unwrap(), 0.25);
        assert_eq!(f_closed(3, 0.0, 6).unwrap(), 0.0);
    }

    #[test]
    fn f_approaches_critical_limit() {
        for (m, n) in [(0usize, 10usize), (3, 10), (7, 10), (12, 40)] {
            let limit = (n as f64 - 2.0 * m as f64) / 16.0;
            for eps in [1e-4, 1e-7, -1e-7, -1e-4] {
                let g = 1.0 + eps;
                let closed = f_closed(m, g, n).unwrap();
                let direct = f_sum(m as i64, g, n).unwrap();
                assert_relative_eq!(closed, direct, epsilon = 1e-12, max_relative = 1e-12);
                assert!((closed - limit).abs() <= eps.abs() * (n * n) as f64);
            }
        }
    }

    #[test]
    fn f_sum_at_range_n_flips_sign() {
        // cos(N k) = -1 on every grid point
        let n = 8;
        for g in [0.3, 1.7] {
            let at_n = f_sum(n as i64, g, n).unwrap();
            let sum_inv: f64 = momentum_grid(n)
                .unwrap()
                .iter()
                .map(|k| 1.0 / dispersion_denominator(k, g))
                .sum::<f64>()
                / (2.0 * n as f64);
            assert_relative_eq!(at_n, -sum_inv, epsilon = 1e-15);
        }
    }

    #[test]
    fn peak_lies_in_ferromagnetic_phase() {
        // m = N/2 peaks where g^N = (N/2 - 1)/(N/2 + 1)
        let (g, _) = h_peak(10, 20, 5.0).unwrap();
        assert!((g - (9.0f64 / 11.0).powf(1.0 / 20.0)).abs() < 1e-9);
        for n in [4usize, 20, 100] {
            for m in [1, n / 4, n / 2] {
                let (g, v) = h_peak(m, n, 5.0).unwrap();
                assert!(
                    g < 1.0 && v >= h_closed(m, 1.0, n).unwrap(),
                    "m = {m}, N = {n}: {g}"
                );
            }
        }
    }

    #[test]
    fn thermo_examples() {
        assert_eq!(h_thermo(1, 0.0).unwrap(), 0.125);
        assert_eq!(h_thermo(2, 0.5).unwrap(), 0.0625);
        assert_eq!(h_thermo(5, 1.0).unwrap(), 0.125);
        assert!(h_thermo(0, 0.5).is_err());
    }

    #[test]
    fn truncated_examples() {
        assert_eq!(h_truncated(3, 0.7, 20, 2).unwrap(), 0.0);
        assert_eq!(
            h_truncated(2, 0.7, 20, 2).unwrap(),
            h_closed(2, 0.7, 20).unwrap()
        );
        for m in 1..=10 {
            assert_eq!(h_truncated(m, 0.7, 20, 0).unwrap(), 0.0);
        }
        assert!(h_truncated(1, 0.7, 20, 11).is_err());
    }

    #[test]
    fn correlation_length_examples() {
        assert_relative_eq!(
            correlation_length(std::f64::consts::E).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_relative_eq!(
            correlation_length(1.0 / std::f64::consts::E).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert_eq!(correlation_length(1.0), Err(Error::Divergence));
        assert!(matches!(
            correlation_length(0.0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn coupling_models_agree_at_endpoints() {
        let n = 16;
        for g in [0.0, 0.3, 1.0, 2.5] {
            let exact = CouplingModel::ExactClosed.couplings(g, n).unwrap();
            let full = CouplingModel::Truncated { max_range: n / 2 }
                .couplings(g, n)
                .unwrap();
            assert_eq!(exact, full);
            let none = CouplingModel::Truncated { max_range: 0 }
                .couplings(g, n)
                .unwrap();
            assert!(none.values().iter().all(|&h| h == 0.0));
            for m in 1..=n / 2 {
                let h = exact.get(m).unwrap();
                assert_relative_eq!(h, h_closed(m, g, n).unwrap(), max_relative = 1e-14);
                let direct = CouplingModel::DirectSum
                    .couplings(g, n)
                    .unwrap()
                    .get(m)
                    .unwrap();
                assert_relative_eq!(h, direct, epsilon = 1e-14, max_relative = 1e-12);
                let thermo = CouplingModel::Thermodynamic
                    .couplings(g, n)
                    .unwrap()
                    .get(m)
                    .unwrap();
                assert_relative_eq!(thermo, h_thermo(m, g).unwrap(), max_relative = 1e-14);
            }
        }
        assert!(CouplingModel::Truncated { max_range: 9 }
            .couplings(0.5, n)
            .is_err());
    }

    #[test]
    fn exact_couplings_at_critical_point() {
        let set = CouplingModel::ExactClosed.couplings(1.0, 30).unwrap();
        assert!(set.values().iter().all(|&h| h == 0.125));
    }
}
