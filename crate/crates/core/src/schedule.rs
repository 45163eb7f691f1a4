//! Cubic field ramp `g(t) = g0 + 3 (gf - g0) (t/T)^2 - 2 (gf - g0) (t/T)^3`.
//!
//! The ramp starts and ends with zero rate, so the counterdiabatic term is
//! switched off at both endpoints.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Schedule {
    g0: f64,
    gf: f64,
    duration: f64,
}

impl Schedule {
    pub fn new(g0: f64, gf: f64, duration: f64) -> Result<Self> {
        for (name, g) in [("g0", g0), ("gf", gf)] {
            if !g.is_finite() || g < 0.0 {
                return Err(Error::invalid(format!(
                    "{name} must be finite and non-negative, got {g}"
                )));
            }
        }
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(Error::invalid(format!(
                "duration must be positive, got {duration}"
            )));
        }
        Ok(Self { g0, gf, duration })
    }

    pub fn initial(&self) -> f64 {
        self.g0
    }

    pub fn target(&self) -> f64 {
        self.gf
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.duration).contains(&t) {
            return Err(Error::invalid(format!(
                "time {t} outside [0, {}]",
                self.duration
            )));
        }
        Ok(())
    }

    /// Field at time `t`.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.field_at(t))
    }

    /// Analytic rate `g'(t) = 6 (gf - g0) t (T - t) / T^3`.
    pub fn rate(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.rate_at(t))
    }

    #[inline]
    pub(crate) fn field_at(&self, t: f64) -> f64 {
        if t >= self.duration {
            return self.gf;
        }
        let tau = t / self.duration;
        self.g0 + (self.gf - self.g0) * tau * tau * (3.0 - 2.0 * tau)
    }

    #[inline]
    pub(crate) fn rate_at(&self, t: f64) -> f64 {
        let t_cubed = self.duration.powi(3);
        6.0 * (self.gf - self.g0) * t * (self.duration - t) / t_cubed
    }
}
