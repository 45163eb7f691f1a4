//! Counterdiabatic driving of the periodic transverse-field Ising chain.
//!
//! The crate is organised bottom-up:
//!
//! - [`coefficients`]: the exact closed-form counterdiabatic couplings `h_m(g)`,
//!   the auxiliary sums `f_m(g)`, their direct-summation counterparts, the
//!   thermodynamic and truncated approximations, and the finite trigonometric
//!   summation identities behind them.
//! - [`schedule`]: the cubic field ramp `g(t)`.
//! - [`integrator`]: an adaptive eighth-order Runge–Kutta integrator for complex
//!   linear systems.
//! - [`dynamics`]: free-fermion evolution of the `k`-modes and the
//!   ground-state preparation probability.
//! - [`spin`]: a dense `2^N` spin-space oracle built from explicit Pauli strings.

pub mod coefficients;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod schedule;
pub mod spin;

pub use coefficients::{CouplingModel, CouplingSet, MomentumGrid};
pub use dynamics::{ChainConfig, EvolutionResult, ModeState};
pub use error::{Error, Result};
pub use integrator::Tolerances;
pub use num_complex::Complex64 as C64;
pub use schedule::Schedule;
