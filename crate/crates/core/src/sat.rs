//! Weakly imposed boundary conditions (simultaneous approximation terms).
//!
//! The semi-discrete system is written as `P U_t = L U + M U + r`, where the
//! SAT contributes the matrix part `M` and the data vector `r`:
//!
//! ```text
//! M = s0 [a e0 e0ᵀ - eps0 e0 Dx0] + sN [-epsN eN DxN]
//! r = -s0 g0 e0 - sN g1 eN
//! ```
//!
//! with a Robin datum `g0 = a u - eps u_x` on the inflow side and a Neumann
//! datum `g1 = eps u_x` on the outflow side.

use alloc::vec::Vec;

use crate::banded::BandedMatrix;
use crate::mesh::GlobalSystem;

/// Penalties and coefficients entering the boundary terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySpec {
    pub a: f64,
    pub eps_left: f64,
    pub eps_right: f64,
    pub sigma_left: f64,
    pub sigma_right: f64,
}

impl BoundarySpec {
    /// Stable default penalties `(-1, 1)`.
    pub fn new(a: f64, eps_left: f64, eps_right: f64) -> Self {
        Self {
            a,
            eps_left,
            eps_right,
            sigma_left: -1.0,
            sigma_right: 1.0,
        }
    }

    pub fn with_penalties(mut self, sigma_left: f64, sigma_right: f64) -> Self {
        self.sigma_left = sigma_left;
        self.sigma_right = sigma_right;
        self
    }
}

/// Sparse SAT contribution: matrix entries `(row, col, value)` and data entries `(row, value)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SatTerms {
    pub matrix: Vec<(usize, usize, f64)>,
    pub rhs: Vec<(usize, f64)>,
}

impl SatTerms {
    /// `m += alpha * M`.
    pub fn add_matrix_to(&self, m: &mut BandedMatrix, alpha: f64) {
        for &(r, c, v) in &self.matrix {
            m.add(r, c, alpha * v);
        }
    }

    /// `rhs += alpha * r`.
    pub fn add_rhs_to(&self, rhs: &mut [f64], alpha: f64) {
        for &(r, v) in &self.rhs {
            rhs[r] += alpha * v;
        }
    }

    /// `M u`.
    pub fn apply_matrix(&self, u: &[f64]) -> Vec<f64> {
        let mut out = alloc::vec![0.0; u.len()];
        for &(r, c, v) in &self.matrix {
            out[r] += v * u[c];
        }
        out
    }
}

/// Matrix part and data vector of the boundary terms for data `(g0, g1)`.
pub fn sat_matrix_and_rhs(spec: &BoundarySpec, sys: &GlobalSystem, g0: f64, g1: f64) -> SatTerms {
    let n = sys.n_nodes();
    let (left, right) = sys.boundary_derivative_rows();
    let mut terms = SatTerms::default();
    let s0 = spec.sigma_left;
    let sn = spec.sigma_right;
    if s0 != 0.0 {
        if spec.a != 0.0 {
            terms.matrix.push((0, 0, s0 * spec.a));
        }
        if spec.eps_left != 0.0 {
            for (c, v) in left {
                terms.matrix.push((0, c, -s0 * spec.eps_left * v));
            }
        }
        terms.rhs.push((0, -s0 * g0));
    }
    if sn != 0.0 {
        if spec.eps_right != 0.0 {
            for (c, v) in right {
                terms.matrix.push((n - 1, c, -sn * spec.eps_right * v));
            }
        }
        if spec.eps_right != 0.0 || g1 != 0.0 {
            terms.rhs.push((n - 1, -sn * g1));
        }
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_mesh, Grading};

    #[test]
    fn pure_advection_inflow_only() {
        let sys = GlobalSystem::new(build_mesh(0.0, 1.0, 4, 2, &Grading::Uniform).unwrap()).unwrap();
        let t = sat_matrix_and_rhs(&BoundarySpec::new(1.0, 0.0, 0.0), &sys, 0.0, 0.0);
        assert_eq!(t.matrix, alloc::vec![(0, 0, -1.0)]);
        assert!(t.rhs.iter().all(|&(_, v)| v == 0.0));
    }

    #[test]
    fn data_signs() {
        let sys = GlobalSystem::new(build_mesh(0.0, 1.0, 3, 3, &Grading::Uniform).unwrap()).unwrap();
        let t = sat_matrix_and_rhs(&BoundarySpec::new(1.0, 0.1, 0.1), &sys, 2.0, 3.0);
        let mut r = alloc::vec![0.0; sys.n_nodes()];
        t.add_rhs_to(&mut r, 1.0);
        assert_eq!(r[0], 2.0);
        assert_eq!(r[sys.n_nodes() - 1], -3.0);
    }
}
