use alloc::vec::Vec;

use super::exact::steady_flux;
use super::StateVector;
use crate::banded::BandedMatrix;
use crate::mesh::GlobalSystem;
use crate::sat::{sat_matrix_and_rhs, BoundarySpec};
use crate::{Error, Result};

/// `a u_x = (eps u_x)_x + f` with Robin inflow and Neumann outflow data.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyProblem {
    pub a: f64,
    pub eps: f64,
    /// Robin datum `a u - eps u_x` at the left end.
    pub g0: f64,
    /// Neumann datum `-eps u_x` at the right end.
    pub g1: f64,
    /// Optional nodal source `f`.
    pub source: Option<Vec<f64>>,
}

impl SteadyProblem {
    /// Data taken from the exponential boundary-layer solution with `u(0) = 1`, `u(1) = 0`.
    pub fn boundary_layer(a: f64, eps: f64) -> Self {
        let g = steady_flux(a, eps);
        Self {
            a,
            eps,
            g0: g,
            g1: g,
            source: None,
        }
    }

    /// Left-hand operator `a Qx - Qxx - M` and right-hand side `r + P f`.
    pub fn system(&self, sys: &GlobalSystem) -> Result<(BandedMatrix, Vec<f64>)> {
        if !self.a.is_finite() {
            return Err(Error::InvalidInput("advection speed must be finite"));
        }
        if !(self.eps >= 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidCoefficient {
                index: 0,
                value: self.eps,
            });
        }
        let n = sys.n_nodes();
        let eps = alloc::vec![self.eps; n];
        let mut a = sys.qx().clone();
        a.scale(self.a);
        a.add_scaled(-1.0, &sys.diffusion(&eps)?)?;
        let sat = sat_matrix_and_rhs(&BoundarySpec::new(self.a, self.eps, self.eps), sys, self.g0, self.g1);
        sat.add_matrix_to(&mut a, -1.0);
        let mut rhs = alloc::vec![0.0; n];
        sat.add_rhs_to(&mut rhs, 1.0);
        if let Some(f) = &self.source {
            if f.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.len(),
                });
            }
            for ((r, fi), m) in rhs.iter_mut().zip(f).zip(sys.mass()) {
                *r += m * fi;
            }
        }
        Ok((a, rhs))
    }
}

/// Solves the steady SAT system by banded LU with iterative refinement.
pub fn solve_steady(sys: &GlobalSystem, problem: &SteadyProblem) -> Result<StateVector> {
    let (a, rhs) = problem.system(sys)?;
    let u = a.solve(&rhs)?;
    let state = StateVector::new(u, 0.0);
    state.check_finite()?;
    Ok(state)
}
