//! Finite trigonometric summation identities tying the direct sums over the
//! momentum grid to the closed forms.

use std::fmt;

use super::appendix::{binomial_moment, w_closed, w_sum};
use super::{
    check_chain_len, dispersion_denominator, f_closed_unchecked, f_sum, grid_momentum, grid_phase,
    h_closed_unchecked, h_sum,
};
use crate::{Error, Result};

/// Residual threshold, absolute below magnitude one and relative above it.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `Delta_m`: `(-1)^{m/N}` when `N` divides `m`, zero otherwise.
pub fn delta_m(m: i64, chain_len: usize) -> f64 {
    let n = chain_len as i64;
    if m.rem_euclid(n) != 0 {
        0.0
    } else if (m / n).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `2 sum_k cos(mk)` by direct summation; equals `N Delta_m`.
pub fn cos_sum(m: i64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    Ok(2.0
        * (0..chain_len / 2)
            .map(|j| grid_phase(m, j, chain_len).cos())
            .sum::<f64>())
}

/// Left side of the tabulated identity
/// `sum_k [sin^2(k/2)/sinh(x) + tanh(x/2)/2]^{-1}`, summed directly.
pub fn ryzhik_sum(x: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    let sh = x.sinh();
    let th = 0.5 * (0.5 * x).tanh();
    Ok((0..chain_len / 2)
        .map(|j| 1.0 / ((0.5 * grid_momentum(j, chain_len)).sin().powi(2) / sh + th))
        .sum())
}

/// Right side, `N tanh(N x / 2)`.
pub fn ryzhik_closed(x: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    let n = chain_len as f64;
    Ok(n * (0.5 * n * x).tanh())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `(1/2N) sum cos(mk) cos k / D = (g^2+1)/(2g) f_m - delta_{m0}/(8g)`
    CosCos,
    /// `(1/2N) sum cos(mk) sin^2 k / D = -((g^2-1)/(2g))^2 f_m + ...`
    CosSinSquared,
    /// `(1/2N) sum sin(mk) sin k cos k / D = (g^2+1)/(2g) h_m - delta_{m1}/(16g)`
    SinSinCos,
    /// Upward recurrence for `h_{m+1}`.
    RecurrenceH,
    /// Upward recurrence for `f_{m+1}`.
    RecurrenceF,
    /// `2 sum_k cos(mk) = N Delta_m`.
    DeltaSum,
    /// The tabulated `tanh` sum at `x = ln g`.
    Ryzhik,
    /// `w_{n+1} = N C(2n,n)/2^{2n+1} - sinh^2(x/2) w_n` on direct sums.
    WRecurrence,
    /// Same recurrence on the closed form.
    WClosedRecurrence,
    /// Closed form of `w_n` against direct summation.
    WClosedForm,
}

impl Identity {
    pub const ALL: [Identity; 10] = [
        Identity::CosCos,
        Identity::CosSinSquared,
        Identity::SinSinCos,
        Identity::RecurrenceH,
        Identity::RecurrenceF,
        Identity::DeltaSum,
        Identity::Ryzhik,
        Identity::WRecurrence,
        Identity::WClosedRecurrence,
        Identity::WClosedForm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::CosCos => "cos-cos",
            Identity::CosSinSquared => "cos-sin2",
            Identity::SinSinCos => "sin-sin-cos",
            Identity::RecurrenceH => "recurrence-h",
            Identity::RecurrenceF => "recurrence-f",
            Identity::DeltaSum => "delta-sum",
            Identity::Ryzhik => "tanh-sum",
            Identity::WRecurrence => "w-recurrence",
            Identity::WClosedRecurrence => "w-closed-recurrence",
            Identity::WClosedForm => "w-closed-form",
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Worst residual of one identity and where it occurred. `index` is `m` for
/// the coupling identities and `n` for the `w` identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub identity: Identity,
    pub max_residual: f64,
    pub index: i64,
    pub g: f64,
    pub chain_len: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub g: f64,
    pub chain_len: usize,
    pub residuals: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn worst(&self) -> Option<&IdentityResidual> {
        self.residuals
            .iter()
            .max_by(|a, b| a.max_residual.total_cmp(&b.max_residual))
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.residuals.iter().all(|r| r.max_residual <= tolerance)
    }
}

fn residual(lhs: f64, rhs: f64) -> f64 {
    let r = (lhs - rhs).abs() / rhs.abs().max(1.0);
    if r.is_nan() {
        f64::INFINITY
    } else {
        r
    }
}

struct Tracker {
    g: f64,
    chain_len: usize,
    slots: Vec<IdentityResidual>,
}

impl Tracker {
    fn record(&mut self, identity: Identity, index: i64, lhs: f64, rhs: f64) {
        let value = residual(lhs, rhs);
        match self.slots.iter_mut().find(|s| s.identity == identity) {
            Some(slot) => {
                if value > slot.max_residual {
                    slot.max_residual = value;
                    slot.index = index;
                }
            }
            None => self.slots.push(IdentityResidual {
                identity,
                max_residual: value,
                index,
                g: self.g,
                chain_len: self.chain_len,
            }),
        }
    }
}

/// Evaluates both sides of every summation identity for `m in [0, N-2]`
/// (and `n in [0, N]` for the `w` sums) and reports the worst residual of each.
///
/// The `x = ln g` identities are skipped at `g = 1`, where `x = 0`.
pub fn verify_identities(g: f64, chain_len: usize) -> Result<IdentityReport> {
    check_chain_len(chain_len)?;
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::invalid(format!(
            "identity checks need 0 < g < inf, got {g}"
        )));
    }
    let n = chain_len;
    let nf = n as f64;
    let mut tracker = Tracker {
        g,
        chain_len,
        slots: Vec::new(),
    };

    let plus = (g * g + 1.0) / (2.0 * g);
    let minus_sq = ((g * g - 1.0) / (2.0 * g)).powi(2);
    let ks: Vec<f64> = (0..n / 2).map(|j| grid_momentum(j, n)).collect();
    let dens: Vec<f64> = ks.iter().map(|&k| dispersion_denominator(k, g)).collect();
    let norm = 1.0 / (2.0 * nf);

    for m in 0..=n.saturating_sub(2) {
        let d0 = if m == 0 { 1.0 } else { 0.0 };
        let d1 = if m == 1 { 1.0 } else { 0.0 };
        let (mut cc, mut cs2, mut ssc) = (0.0, 0.0, 0.0);
        for (j, (&k, &d)) in ks.iter().zip(&dens).enumerate() {
            let (sk, ck) = k.sin_cos();
            let (smk, cmk) = grid_phase(m as i64, j, n).sin_cos();
            cc += cmk * ck / d;
            cs2 += cmk * sk * sk / d;
            ssc += smk * sk * ck / d;
        }
        let f_m = f_closed_unchecked(m, g, n);
        let h_m = h_closed_unchecked(m, g, n);
        tracker.record(
            Identity::CosCos,
            m as i64,
            cc * norm,
            plus * f_m - d0 / (8.0 * g),
        );
        tracker.record(
            Identity::CosSinSquared,
            m as i64,
            cs2 * norm,
            -minus_sq * f_m + (g * g + 1.0) / (16.0 * g * g) * d0 + d1 / (16.0 * g),
        );
        tracker.record(
            Identity::SinSinCos,
            m as i64,
            ssc * norm,
            plus * h_m - d1 / (16.0 * g),
        );

        let h_next = h_sum(m as i64 + 1, g, n)?;
        let f_next = f_sum(m as i64 + 1, g, n)?;
        tracker.record(
            Identity::RecurrenceH,
            m as i64,
            h_next,
            plus * h_m - minus_sq * f_m + (g * g + 1.0) / (16.0 * g * g) * d0,
        );
        tracker.record(
            Identity::RecurrenceF,
            m as i64,
            f_next,
            plus * f_m - h_m - d0 / (8.0 * g),
        );
    }

    for m in -(2 * n as i64)..=(2 * n as i64) {
        tracker.record(Identity::DeltaSum, m, cos_sum(m, n)?, nf * delta_m(m, n));
    }

    if g != 1.0 {
        let x = g.ln();
        let r = (0.5 * x).sinh().powi(2);
        tracker.record(Identity::Ryzhik, 0, ryzhik_sum(x, n)?, ryzhik_closed(x, n)?);
        let direct: Vec<f64> = (0..=n).map(|p| w_sum(p, x, n)).collect::<Result<_>>()?;
        let closed: Vec<f64> = (0..=n).map(|p| w_closed(p, x, n)).collect::<Result<_>>()?;
        for p in 0..n {
            let source = nf * binomial_moment(p);
            tracker.record(
                Identity::WRecurrence,
                p as i64,
                direct[p + 1],
                source - r * direct[p],
            );
            tracker.record(
                Identity::WClosedRecurrence,
                p as i64,
                closed[p + 1],
                source - r * closed[p],
            );
        }
        for p in 0..=n {
            tracker.record(Identity::WClosedForm, p as i64, closed[p], direct[p]);
        }
    }

    Ok(IdentityReport {
        g,
        chain_len,
        residuals: tracker.slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_values() {
        assert_eq!(delta_m(0, 6), 1.0);
        assert_eq!(delta_m(6, 6), -1.0);
        assert_eq!(delta_m(-6, 6), -1.0);
        assert_eq!(delta_m(12, 6), 1.0);
        assert_eq!(delta_m(3, 6), 0.0);
    }

    #[test]
    fn identities_hold_at_g_two_n_ten() {
        let report = verify_identities(2.0, 10).unwrap();
        assert_eq!(report.residuals.len(), Identity::ALL.len());
        for r in &report.residuals {
            assert!(r.max_residual <= IDENTITY_TOLERANCE, "{r:?}");
        }
    }

    #[test]
    fn identities_hold_at_critical_point() {
        let report = verify_identities(1.0, 16).unwrap();
        assert!(report.passes(IDENTITY_TOLERANCE), "{:?}", report.worst());
        assert!(report
            .residuals
            .iter()
            .all(|r| r.identity != Identity::Ryzhik));
    }

    #[test]
    fn kronecker_terms_matter() {
        // Dropping delta_{m0} from the h recurrence breaks it at m = 0 only.
        let g: f64 = 0.6;
        let n = 8;
        let plus = (g * g + 1.0) / (2.0 * g);
        let minus_sq = ((g * g - 1.0) / (2.0 * g)).powi(2);
        let h1 = h_sum(1, g, n).unwrap();
        let without = plus * h_closed_unchecked(0, g, n) - minus_sq * f_closed_unchecked(0, g, n);
        assert!((h1 - without).abs() > 1e-3);
        assert!((h1 - without - (g * g + 1.0) / (16.0 * g * g)).abs() < 1e-14);
    }

    #[test]
    fn ryzhik_example() {
        // f_0 at g = e, N = 2 from the tanh sum with x = 1
        let n = 2;
        let g = std::f64::consts::E;
        let f0 = f_sum(0, g, n).unwrap();
        let expected = (0.5 * n as f64).tanh() / (8.0 * g * 1f64.sinh());
        assert!((f0 - expected).abs() < 1e-16);
        assert!((ryzhik_sum(1.0, n).unwrap() - ryzhik_closed(1.0, n).unwrap()).abs() < 1e-14);
    }
}
