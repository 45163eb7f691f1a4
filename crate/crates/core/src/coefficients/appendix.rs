//! Trigonometric-polynomial machinery behind the closed forms: the
//! `sin^2(k/2)` expansions of `sin(k) sin(mk)` and `cos(mk)`, the power sums
//! `w_n`, and the double-sum representations of `h_m` and `f_m` whose
//! `N`-dependence is already in closed form.
//!
//! These routes are for verification. The dynamics never touches them.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{check_chain_len, grid_momentum};
use crate::{Error, Result};

/// Largest `m` accepted by the expansion-based routes.
pub const MAX_EXPANSION_ORDER: usize = 64;

fn check_order(m: usize) -> Result<()> {
    if m > MAX_EXPANSION_ORDER {
        return Err(Error::UnsupportedRange(format!(
            "expansion order m = {m} exceeds {MAX_EXPANSION_ORDER}"
        )));
    }
    Ok(())
}

/// Coefficients `A^m_s`, `s = 0..=m`, with
/// `sin(k) sin(mk) = sum_s A^m_s sin^{2s+2}(k/2)`.
///
/// Built by a multiplicative recurrence over `s` so no factorial is ever formed.
pub fn expansion_a(m: usize) -> Result<Vec<f64>> {
    check_order(m)?;
    if m == 0 {
        return Ok(vec![0.0]);
    }
    let mf = m as f64;
    let mut c = 2.0 / mf;
    let mut out = Vec::with_capacity(m + 1);
    for s in 0..=m {
        let sf = s as f64;
        out.push(c * (2.0 * mf * mf + sf));
        c *= -4.0 * (mf + sf) * (mf - sf) / ((2.0 * sf + 2.0) * (2.0 * sf + 3.0));
    }
    Ok(out)
}

/// Coefficients `B^m_s`, `s = 0..=m`, with `cos(mk) = sum_s B^m_s sin^{2s}(k/2)`.
pub fn expansion_b(m: usize) -> Result<Vec<f64>> {
    check_order(m)?;
    if m == 0 {
        return Ok(vec![1.0]);
    }
    let mf = m as f64;
    let mut d = 1.0;
    let mut out = Vec::with_capacity(m + 1);
    for s in 0..=m {
        let sf = s as f64;
        out.push(d);
        d *= -4.0 * (mf + sf) * (mf - sf) / ((2.0 * sf + 1.0) * (2.0 * sf + 2.0));
    }
    Ok(out)
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn exact_ratio(num: BigInt, den: BigInt) -> BigInt {
    debug_assert!(
        (&num % &den).is_zero(),
        "expansion coefficient is not integral"
    );
    num / den
}

/// Integer-exact `A^m_s`.
pub fn expansion_a_exact(m: usize) -> Result<Vec<BigInt>> {
    check_order(m)?;
    if m == 0 {
        return Ok(vec![BigInt::zero()]);
    }
    Ok((0..=m)
        .map(|s| {
            let num = (BigInt::one() << (2 * s + 1)) * (2 * m * m + s) * factorial(m + s - 1);
            let value = exact_ratio(num, factorial(m - s) * factorial(2 * s + 1));
            if s % 2 == 1 {
                -value
            } else {
                value
            }
        })
        .collect())
}

/// Integer-exact `B^m_s`.
pub fn expansion_b_exact(m: usize) -> Result<Vec<BigInt>> {
    check_order(m)?;
    if m == 0 {
        return Ok(vec![BigInt::one()]);
    }
    Ok((0..=m)
        .map(|s| {
            let num = (BigInt::one() << (2 * s)) * m * factorial(m + s - 1);
            let value = exact_ratio(num, factorial(m - s) * factorial(2 * s));
            if s % 2 == 1 {
                -value
            } else {
                value
            }
        })
        .collect())
}

/// Evaluates `sum_s coeffs[s] * y^(s + shift)` exactly in rational arithmetic
/// and rounds once at the end.
///
/// The monomial expansions have alternating coefficients of size up to
/// `T_m(3) ~ 5.8^m`, so evaluating them in floating point loses every digit
/// for moderate `m`. Any finite `y` is a dyadic rational, which makes the exact
/// evaluation cheap.
pub fn reconstruct_exact(coeffs: &[BigInt], y: f64, shift: u32) -> f64 {
    assert!(y.is_finite(), "reconstruction point must be finite");
    if coeffs.is_empty() {
        return 0.0;
    }
    let (mant, exp) = decompose(y);
    let a = BigInt::from(mant) * if y < 0.0 { -1 } else { 1 };
    let deg = coeffs.len() - 1;
    let total_deg = deg + shift as usize;
    if exp >= 0 {
        let z = a << exp as usize;
        let mut acc = BigInt::zero();
        for c in coeffs.iter().rev() {
            acc = acc * &z + c;
        }
        for _ in 0..shift {
            acc *= &z;
        }
        return to_f64_scaled(&acc, 0);
    }
    // y = a / 2^e; homogeneous Horner: sum_s c_s a^s 2^{e (deg - s)}
    let e = (-exp) as usize;
    let mut acc = coeffs[deg].clone();
    for (i, c) in coeffs[..deg].iter().rev().enumerate() {
        acc = acc * &a + (c << (e * (i + 1)));
    }
    for _ in 0..shift {
        acc *= &a;
    }
    to_f64_scaled(&acc, -((e * total_deg) as i64))
}

/// `|y| = mant * 2^exp` with integer mantissa.
fn decompose(y: f64) -> (u64, i64) {
    if y == 0.0 {
        return (0, 0);
    }
    let bits = y.abs().to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    }
}

/// `value * 2^exp2` rounded to the nearest double.
fn to_f64_scaled(value: &BigInt, exp2: i64) -> f64 {
    if value.is_zero() {
        return 0.0;
    }
    let negative = value.is_negative();
    let magnitude = value.abs();
    let bits = magnitude.bits() as i64;
    let (top, shift) = if bits > 64 {
        (
            (&magnitude >> (bits - 64) as usize)
                .to_u64()
                .unwrap_or(u64::MAX),
            bits - 64,
        )
    } else {
        (magnitude.to_u64().unwrap_or(u64::MAX), 0)
    };
    let out = ldexp(top as f64, shift + exp2);
    if negative {
        -out
    } else {
        out
    }
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `C(2s, s) / 2^{2s+1}`, i.e. `(1/N) sum_k sin^{2s}(k/2)` for `s < N`.
pub fn binomial_moment(s: usize) -> f64 {
    (1..=s).fold(0.5, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
}

/// `sum_k sin^{2s}(k/2)` for any `s >= 0`, including the aliased terms that
/// appear once `s >= N`.
pub fn moment_sum(s: usize, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    // weights C(2s, s + p) / 4^s for p = 0, 1, ...
    let mut weight = 2.0 * binomial_moment(s);
    let mut total = weight;
    for p in 1..=s {
        weight *= (s - p + 1) as f64 / (s + p) as f64;
        if p % chain_len == 0 {
            let sign = if (p / chain_len) % 2 == 1 { -1.0 } else { 1.0 };
            total += 2.0 * sign * weight;
        }
    }
    Ok(0.5 * chain_len as f64 * total)
}

fn check_log_field(x: f64) -> Result<()> {
    if !x.is_finite() || x == 0.0 {
        return Err(Error::invalid(format!(
            "log-field x must be finite and non-zero, got {x}"
        )));
    }
    Ok(())
}

/// `w_n(x) = sum_k sin^{2n}(k/2) / (sin^2(k/2) + sinh^2(x/2))` by direct summation.
pub fn w_sum(n: usize, x: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    let r = (0.5 * x).sinh().powi(2);
    Ok((0..chain_len / 2)
        .map(|j| {
            let s2 = (0.5 * grid_momentum(j, chain_len)).sin().powi(2);
            s2.powi(n as i32) / (s2 + r)
        })
        .sum())
}

/// Closed form of `w_n(x)` for `n in [0, N]`.
///
/// For `sinh^2(x/2) <= 1` this is the solved recurrence
/// `N (-r)^n tanh(Nx/2)/sinh(x) + N sum_{s<n} C(2s,s)/2^{2s+1} (-r)^{n-s-1}`.
/// When `r = sinh^2(x/2) > 1` and `r^n` is large that expression cancels
/// catastrophically, so the same quantity is summed as the convergent
/// alternating series `sum_j (-1)^j r^{-j-1} M_{n+j}` over exact moments
/// `M_s = sum_k sin^{2s}(k/2)`.
pub fn w_closed(n: usize, x: f64, chain_len: usize) -> Result<f64> {
    check_chain_len(chain_len)?;
    check_log_field(x)?;
    if n > chain_len {
        return Err(Error::invalid(format!(
            "power index n = {n} outside [0, {chain_len}]"
        )));
    }
    let r = (0.5 * x).sinh().powi(2);
    let nf = chain_len as f64;
    if r <= 1.0 || n as f64 * r.ln() <= 3.0 {
        let w0_scaled = (0.5 * nf * x).tanh() / x.sinh();
        let mut acc = 0.0;
        let mut b = 0.5;
        for s in 0..n {
            acc = acc * (-r) + b;
            b *= (2 * s + 1) as f64 / (2 * s + 2) as f64;
        }
        let lead = if n % 2 == 0 {
            r.powi(n as i32)
        } else {
            -r.powi(n as i32)
        };
        return Ok(nf * (lead * w0_scaled + acc));
    }
    let mut total = 0.0;
    let mut scale = 1.0 / r;
    for j in 0.. {
        let term = scale * moment_sum(n + j, chain_len)?;
        total += if j % 2 == 0 { term } else { -term };
        if term.abs() <= 1e-18 * total.abs() || j > 200_000 {
            break;
        }
        scale /= r;
    }
    Ok(total)
}

fn check_appendix_args(m: usize, g: f64, chain_len: usize, min_m: usize) -> Result<()> {
    check_chain_len(chain_len)?;
    check_order(m)?;
    if m < min_m || m >= chain_len {
        return Err(Error::invalid(format!(
            "range index m = {m} outside [{min_m}, {}]",
            chain_len - 1
        )));
    }
    if !(g > 0.0) || !g.is_finite() || g == 1.0 {
        return Err(Error::invalid(format!(
            "field must satisfy g > 0, g != 1, got {g}"
        )));
    }
    Ok(())
}

/// Largest absolute rounding bound accepted from the alternating double sums.
pub const APPENDIX_ROUNDING_LIMIT: f64 = 1e-10;

fn check_cancellation(m: usize, g: f64, total: f64, magnitude: f64) -> Result<()> {
    let bound = 4.0 * (m + 1) as f64 * f64::EPSILON * magnitude / (8.0 * g);
    if !total.is_finite() || bound > APPENDIX_ROUNDING_LIMIT {
        return Err(Error::UnsupportedRange(format!(
            "double sum for m = {m} cancels {magnitude:.3e} down to {total:.3e}"
        )));
    }
    Ok(())
}

/// `h_m(g)` from its double-sum representation, `1 <= m <= min(N-1, 64)`.
///
/// The terms alternate and grow like `5.8^m`; when the rounding bound
/// exceeds [`APPENDIX_ROUNDING_LIMIT`] the call fails with
/// `UnsupportedRange` instead of returning noise.
pub fn h_appendix(m: usize, g: f64, chain_len: usize) -> Result<f64> {
    check_appendix_args(m, g, chain_len, 1)?;
    let n = chain_len as i32;
    let r = (g - 1.0).powi(2) / (4.0 * g);
    let lead = if g <= 1.0 {
        (g.powi(n) + g) / ((g + 1.0) * (g.powi(n) + 1.0))
    } else {
        (1.0 + g.powi(1 - n)) / ((g + 1.0) * (1.0 + g.powi(-n)))
    };
    let coeffs = expansion_a(m)?;
    // e_j = r^j (lead + sum_{s=1}^{j} (-1)^s b_s r^{-s})
    let mut e = lead;
    let mut b = 0.5;
    let mut total = coeffs[0] * e;
    let mut e_abs = lead.abs();
    let mut magnitude = total.abs();
    for (j, a) in coeffs.iter().enumerate().skip(1) {
        b *= (2 * j - 1) as f64 / (2 * j) as f64;
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        e = r * e + sign * b;
        e_abs = r * e_abs + b;
        total += sign * a * e;
        magnitude += a.abs() * e_abs;
    }
    check_cancellation(m, g, total, magnitude)?;
    Ok(total / (8.0 * g))
}

/// `f_m(g)` from its double-sum representation, `0 <= m <= min(N-1, 64)`.
pub fn f_appendix(m: usize, g: f64, chain_len: usize) -> Result<f64> {
    check_appendix_args(m, g, chain_len, 0)?;
    let n = chain_len as i32;
    let r = (g - 1.0).powi(2) / (4.0 * g);
    let ratio = if g <= 1.0 {
        (g.powi(n) - 1.0) / (g.powi(n) + 1.0)
    } else {
        (1.0 - g.powi(-n)) / (1.0 + g.powi(-n))
    };
    let lead = 2.0 * g / ((g - 1.0) * (g + 1.0)) * ratio;
    let coeffs = expansion_b(m)?;
    // e_j = r^j lead - sum_{s<j} (-1)^s b_s r^{j-s-1}
    let mut e = lead;
    let mut b = 0.5;
    let mut total = coeffs[0] * e;
    let mut e_abs = lead.abs();
    let mut magnitude = total.abs();
    for (j, c) in coeffs.iter().enumerate().skip(1) {
        let prev_sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
        e = r * e - prev_sign * b;
        e_abs = r * e_abs + b;
        b *= (2 * j - 1) as f64 / (2 * j) as f64;
        total += -prev_sign * c * e;
        magnitude += c.abs() * e_abs;
    }
    check_cancellation(m, g, total, magnitude)?;
    Ok(total / (8.0 * g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{f_closed, f_sum, h_closed};
    use approx::assert_relative_eq;

    #[test]
    fn expansion_small_orders() {
        assert_eq!(expansion_a(0).unwrap(), vec![0.0]);
        assert_eq!(expansion_a(1).unwrap(), vec![4.0, -4.0]);
        assert_eq!(expansion_b(0).unwrap(), vec![1.0]);
        assert_eq!(expansion_b(1).unwrap(), vec![1.0, -2.0]);
        assert_eq!(expansion_b(2).unwrap(), vec![1.0, -8.0, 8.0]);
        let exact: Vec<i64> = expansion_b_exact(2)
            .unwrap()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect();
        assert_eq!(exact, vec![1, -8, 8]);
        let exact: Vec<i64> = expansion_a_exact(1)
            .unwrap()
            .iter()
            .map(|c| c.to_i64().unwrap())
            .collect();
        assert_eq!(exact, vec![4, -4]);
    }

    #[test]
    fn expansion_a_order_two_pointwise() {
        let coeffs = expansion_a(2).unwrap();
        for k in [0.3f64, 1.1, 2.7] {
            let s2 = (0.5 * k).sin().powi(2);
            let poly: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(s, a)| a * s2.powi(s as i32 + 1))
                .sum();
            assert_relative_eq!(poly, k.sin() * (2.0 * k).sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn float_coefficients_track_exact_ones() {
        for m in 0..=MAX_EXPANSION_ORDER {
            let pairs = [
                (expansion_a(m).unwrap(), expansion_a_exact(m).unwrap()),
                (expansion_b(m).unwrap(), expansion_b_exact(m).unwrap()),
            ];
            for (float, exact) in pairs {
                for (f, e) in float.iter().zip(&exact) {
                    let e = e.to_f64().unwrap();
                    assert!((f - e).abs() <= 1e-12 * e.abs(), "m = {m}: {f} vs {e}");
                }
            }
        }
        assert!(matches!(expansion_a(65), Err(Error::UnsupportedRange(_))));
        assert!(matches!(
            expansion_b_exact(65),
            Err(Error::UnsupportedRange(_))
        ));
    }

    #[test]
    fn reconstruct_handles_dyadics() {
        let coeffs: Vec<BigInt> = [3, -2, 5].iter().map(|&c| BigInt::from(c)).collect();
        for y in [0.0, 0.375, 0.1, 0.999, 2.0, -1.5] {
            let direct = y * (3.0 - 2.0 * y + 5.0 * y * y);
            assert_relative_eq!(
                reconstruct_exact(&coeffs, y, 1),
                direct,
                epsilon = 1e-15,
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn moments_match_direct_sums() {
        for n in [2usize, 4, 6, 10] {
            for s in 0..4 * n {
                let direct: f64 = (0..n / 2)
                    .map(|j| (0.5 * grid_momentum(j, n)).sin().powi(2 * s as i32))
                    .sum();
                assert_relative_eq!(
                    moment_sum(s, n).unwrap(),
                    direct,
                    epsilon = 1e-14,
                    max_relative = 1e-12
                );
                if s < n {
                    assert_relative_eq!(
                        moment_sum(s, n).unwrap(),
                        n as f64 * binomial_moment(s),
                        max_relative = 1e-14
                    );
                }
            }
        }
    }

    #[test]
    fn w_closed_examples() {
        let w0 = w_closed(0, 1.0, 2).unwrap();
        assert_relative_eq!(w0, 2.0 * 1f64.tanh() / 1f64.sinh(), max_relative = 1e-15);
        for x in [0.2, -0.7, 1.3] {
            let r = (0.5f64 * x).sinh().powi(2);
            let n = 10;
            assert_relative_eq!(
                w_closed(1, x, n).unwrap(),
                n as f64 / 2.0 - r * w_closed(0, x, n).unwrap(),
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            w_closed(2, 0.5, 8).unwrap(),
            w_sum(2, 0.5, 8).unwrap(),
            epsilon = 1e-12
        );
        assert!(w_closed(9, 0.5, 8).is_err());
        assert!(w_closed(2, 0.0, 8).is_err());
    }

    #[test]
    fn w_closed_stable_for_large_r() {
        // g = 0.05 gives sinh^2(x/2) ~ 4.5
        let x = 0.05f64.ln();
        for n in [0usize, 5, 40, 100, 200] {
            let closed = w_closed(n, x, 200).unwrap();
            let direct = w_sum(n, x, 200).unwrap();
            assert!(
                (closed - direct).abs() <= 1e-12 * direct.abs().max(1.0),
                "n = {n}: {closed} vs {direct}"
            );
        }
    }

    #[test]
    fn appendix_routes_match_closed_forms() {
        assert_relative_eq!(h_appendix(1, 2.0, 2).unwrap(), 0.05, epsilon = 1e-15);
        assert_relative_eq!(
            h_appendix(2, 0.5, 8).unwrap(),
            h_closed(2, 0.5, 8).unwrap(),
            epsilon = 1e-10
        );
        for n in [4usize, 8, 12] {
            for g in [0.3, 0.8, 1.4, 3.0] {
                for m in 1..n.min(8) {
                    let closed = h_closed(m, g, n).unwrap();
                    match h_appendix(m, g, n) {
                        Ok(v) => assert_relative_eq!(v, closed, epsilon = 1e-10),
                        Err(e) => assert!(m > 4 && matches!(e, Error::UnsupportedRange(_))),
                    }
                }
                for m in 0..n.min(8) {
                    let closed = f_closed(m, g, n).unwrap();
                    match f_appendix(m, g, n) {
                        Ok(v) => assert_relative_eq!(v, closed, epsilon = 1e-10),
                        Err(e) => assert!(m > 4 && matches!(e, Error::UnsupportedRange(_))),
                    }
                    assert_relative_eq!(f_sum(m as i64, g, n).unwrap(), closed, epsilon = 1e-13);
                }
            }
        }
        assert!(h_appendix(0, 0.5, 8).is_err());
        assert!(h_appendix(3, 1.0, 8).is_err());
        assert!(matches!(
            h_appendix(70, 0.5, 200),
            Err(Error::UnsupportedRange(_))
        ));
    }
}
