use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{Scheme, StateVector, TimeIntegrator};
use crate::banded::{BandedLu, BandedMatrix};
use crate::dissipation::{activation_field, assemble_ad, Activation, DissipationSpec};
use crate::mesh::GlobalSystem;
use crate::sat::{sat_matrix_and_rhs, BoundarySpec, SatTerms};
use crate::{Error, Result};

type DataFn<'a> = Box<dyn Fn(f64) -> (f64, f64) + 'a>;

/// `P U_t + a Qx U + a D_AD U = Qxx U + SAT` on a fixed mesh.
///
/// Written as `P U_t = L(t) U + r(t)` with
/// `L = -a Qx + Qxx - a D_AD + M`, where `M` and `r` are the boundary terms.
pub struct LinearAdvection<'a> {
    sys: &'a GlobalSystem,
    a: f64,
    eps: f64,
    diffusion: Option<BandedMatrix>,
    ad: DissipationSpec,
    track_speed: f64,
    penalties: (f64, f64),
    data: DataFn<'a>,
    cache: Option<CachedStep>,
}

struct CachedStep {
    active: Vec<bool>,
    dt: f64,
    lhs: BandedMatrix,
    lu: BandedLu,
}

impl<'a> LinearAdvection<'a> {
    pub fn new(sys: &'a GlobalSystem, a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::InvalidInput("advection speed must be finite and non-negative"));
        }
        Ok(Self {
            sys,
            a,
            eps: 0.0,
            diffusion: None,
            ad: DissipationSpec::off(sys.mesh().order()),
            track_speed: 0.0,
            penalties: (-1.0, 1.0),
            data: Box::new(|_| (0.0, 0.0)),
            cache: None,
        })
    }

    /// Constant diffusion coefficient.
    pub fn with_diffusion(mut self, eps: f64) -> Result<Self> {
        let nodal = alloc::vec![eps; self.sys.n_nodes()];
        self.diffusion = if eps == 0.0 { None } else { Some(self.sys.diffusion(&nodal)?) };
        self.eps = eps;
        self.cache = None;
        Ok(self)
    }

    /// Dissipation; a window's center moves with `track_speed`.
    pub fn with_dissipation(mut self, spec: DissipationSpec, track_speed: f64) -> Result<Self> {
        if spec.order() != self.sys.mesh().order() {
            return Err(Error::DimensionMismatch {
                expected: self.sys.mesh().order(),
                found: spec.order(),
            });
        }
        self.ad = spec;
        self.track_speed = track_speed;
        self.cache = None;
        Ok(self)
    }

    /// Boundary data `t -> (g0, g1)`.
    pub fn with_boundary_data(mut self, data: impl Fn(f64) -> (f64, f64) + 'a) -> Self {
        self.data = Box::new(data);
        self
    }

    pub fn with_penalties(mut self, sigma_left: f64, sigma_right: f64) -> Self {
        self.penalties = (sigma_left, sigma_right);
        self.cache = None;
        self
    }

    pub fn system(&self) -> &GlobalSystem {
        self.sys
    }

    /// Activation at time `t`.
    pub fn active_elements(&self, t: f64) -> Vec<bool> {
        let activation = match self.ad.activation() {
            Activation::Window { center, .. } => self.ad.activation().recentered(center + self.track_speed * t),
            Activation::Global => Activation::Global,
        };
        activation_field(self.sys.mesh(), activation, t)
    }

    fn sat(&self, t: f64) -> SatTerms {
        let (g0, g1) = (self.data)(t);
        let spec = BoundarySpec::new(self.a, self.eps, self.eps).with_penalties(self.penalties.0, self.penalties.1);
        sat_matrix_and_rhs(&spec, self.sys, g0, g1)
    }

    fn operator_for(&self, active: &[bool], sat: &SatTerms) -> Result<BandedMatrix> {
        let mut l = self.sys.qx().clone();
        l.scale(-self.a);
        if let Some(d) = &self.diffusion {
            l.add_scaled(1.0, d)?;
        }
        if !self.ad.is_off() && active.iter().any(|&f| f) {
            let ad = assemble_ad(self.sys.mesh(), self.sys.ops(), &self.ad, active)?;
            l.add_scaled(-self.a, &ad)?;
        }
        sat.add_matrix_to(&mut l, 1.0);
        Ok(l)
    }

    /// `L(t)`.
    pub fn operator(&self, t: f64) -> Result<BandedMatrix> {
        self.operator_for(&self.active_elements(t), &self.sat(t))
    }

    /// `P U_t = L(t) U + r(t)`.
    pub fn rhs(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        let sat = self.sat(t);
        let l = self.operator_for(&self.active_elements(t), &sat)?;
        let mut out = l.mul_vec(u);
        sat.add_rhs_to(&mut out, 1.0);
        Ok(out)
    }

    /// `Uᵀ P U_t`, half the rate of change of `Uᵀ P U`.
    pub fn energy_rate(&self, u: &[f64], t: f64) -> Result<f64> {
        let r = self.rhs(u, t)?;
        Ok(u.iter().zip(&r).map(|(a, b)| a * b).sum())
    }

    /// One step of size `integrator.dt`.
    pub fn advance(&mut self, state: &StateVector, integrator: &TimeIntegrator) -> Result<StateVector> {
        let n = self.sys.n_nodes();
        if state.u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: state.u.len(),
            });
        }
        let dt = integrator.dt;
        let next = match integrator.scheme {
            Scheme::BackwardEuler => self.backward_euler(state, dt)?,
            Scheme::Rk4 => self.rk4(state, dt)?,
        };
        next.check_finite()?;
        Ok(next)
    }

    fn backward_euler(&mut self, state: &StateVector, dt: f64) -> Result<StateVector> {
        let t1 = state.t + dt;
        let active = self.active_elements(t1);
        let sat = self.sat(t1);
        let reuse = matches!(&self.cache, Some(c) if c.active == active && c.dt == dt);
        if !reuse {
            let mut lhs = self.operator_for(&active, &sat)?;
            lhs.scale(-1.0);
            lhs.add_diagonal(self.sys.mass(), 1.0 / dt);
            let lu = lhs.factor()?;
            self.cache = Some(CachedStep { active, dt, lhs, lu });
        }
        let cache = self.cache.as_ref().expect("filled above");
        let mut b: Vec<f64> = state.u.iter().zip(self.sys.mass()).map(|(u, m)| m * u / dt).collect();
        sat.add_rhs_to(&mut b, 1.0);
        let u = cache.lu.solve_refined(&cache.lhs, &b)?;
        Ok(StateVector::new(u, t1))
    }

    fn rk4(&self, state: &StateVector, dt: f64) -> Result<StateVector> {
        let m = self.sys.mass();
        let f = |u: &[f64], t: f64| -> Result<Vec<f64>> {
            let r = self.rhs(u, t)?;
            Ok(r.iter().zip(m).map(|(r, m)| r / m).collect())
        };
        let axpy = |u: &[f64], k: &[f64], h: f64| -> Vec<f64> { u.iter().zip(k).map(|(u, k)| u + h * k).collect() };
        let t = state.t;
        let k1 = f(&state.u, t)?;
        let k2 = f(&axpy(&state.u, &k1, 0.5 * dt), t + 0.5 * dt)?;
        let k3 = f(&axpy(&state.u, &k2, 0.5 * dt), t + 0.5 * dt)?;
        let k4 = f(&axpy(&state.u, &k3, dt), t + dt)?;
        let u = (0..state.u.len())
            .map(|i| state.u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        Ok(StateVector::new(u, t + dt))
    }

    /// Advances to `t_end` with steps as close to `integrator.dt` as divide the interval evenly.
    pub fn run(&mut self, state: StateVector, integrator: &TimeIntegrator, t_end: f64) -> Result<StateVector> {
        let (n, dt) = integrator.steps(state.t, t_end);
        let step = TimeIntegrator { dt, ..*integrator };
        let mut s = state;
        for _ in 0..n {
            s = self.advance(&s, &step)?;
        }
        Ok(s)
    }
}
