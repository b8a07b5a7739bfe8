//! Steady and transient drivers, exact solutions and the discrete energy.

mod burgers;
pub mod exact;
mod linear;
mod steady;

use alloc::vec::Vec;

pub use burgers::{split_form_flux, AdSpeedScaling, BurgersSolver};
pub use linear::LinearAdvection;
pub use steady::{solve_steady, SteadyProblem};

use crate::{Error, Result};

/// Global nodal values at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub u: Vec<f64>,
    pub t: f64,
}

impl StateVector {
    pub fn new(u: Vec<f64>, t: f64) -> Self {
        Self { u, t }
    }

    /// Fails with [`Error::NonFinite`] if any entry is NaN or infinite.
    pub fn check_finite(&self) -> Result<()> {
        if self.u.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { time: self.t })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    BackwardEuler,
    Rk4,
}

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeIntegrator {
    pub scheme: Scheme,
    pub dt: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub max_halvings: usize,
}

impl TimeIntegrator {
    pub fn backward_euler(dt: f64) -> Result<Self> {
        Self::new(Scheme::BackwardEuler, dt)
    }

    pub fn new(scheme: Scheme, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidInput("time step must be positive"));
        }
        Ok(Self {
            scheme,
            dt,
            newton_tol: 1e-12,
            newton_max_iter: 30,
            max_halvings: 5,
        })
    }

    /// Number of steps of size close to `dt` covering `[t0, t_end]`, and the exact step.
    pub fn steps(&self, t0: f64, t_end: f64) -> (usize, f64) {
        let span = t_end - t0;
        if span <= 0.0 {
            return (0, self.dt);
        }
        let n = libm::ceil(span / self.dt - 1e-9).max(1.0) as usize;
        (n, span / n as f64)
    }
}

/// `Uᵀ P U` for a diagonal mass `P`.
pub fn discrete_energy(u: &[f64], mass: &[f64]) -> Result<f64> {
    if u.len() != mass.len() {
        return Err(Error::DimensionMismatch {
            expected: mass.len(),
            found: u.len(),
        });
    }
    Ok(u.iter().zip(mass).map(|(v, m)| v * v * m).sum())
}
