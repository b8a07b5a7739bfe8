use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{StateVector, TimeIntegrator};
use crate::banded::BandedMatrix;
use crate::dissipation::{activation_field, element_ad_blocks, DissipationSpec};
use crate::fp::max_abs;
use crate::mesh::GlobalSystem;
use crate::{Error, Matrix, Result};

/// Speed factor multiplying each element's dissipation block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AdSpeedScaling {
    /// `max |u|` over the element's nodes.
    ElementMax,
    /// A fixed constant.
    Frozen(f64),
}

type DataFn<'a> = Box<dyn Fn(f64) -> (f64, f64) + 'a>;

/// Split-form Burgers, `P U_t + (1/3)[diag(U) Qx U + Qx U^2] + S(U) D_AD U = SAT`,
/// advanced with backward Euler and Newton.
///
/// Boundary terms follow the linear inflow penalty with the local speed:
/// `-u0 (u0 - g0)` at the left end when `u0 > 0` and `-|uN| (uN - gN)` at
/// the right end when `uN < 0`; outflow ends get nothing.
pub struct BurgersSolver<'a> {
    sys: &'a GlobalSystem,
    ad: DissipationSpec,
    scaling: AdSpeedScaling,
    data: DataFn<'a>,
}

/// `(1/3)[diag(U) Qx U + Qx U^2]`.
pub fn split_form_flux(sys: &GlobalSystem, u: &[f64]) -> Vec<f64> {
    let qu = sys.qx().mul_vec(u);
    let u2: Vec<f64> = u.iter().map(|v| v * v).collect();
    let qu2 = sys.qx().mul_vec(&u2);
    (0..u.len()).map(|i| (u[i] * qu[i] + qu2[i]) / 3.0).collect()
}

impl<'a> BurgersSolver<'a> {
    pub fn new(sys: &'a GlobalSystem) -> Self {
        Self {
            sys,
            ad: DissipationSpec::off(sys.mesh().order()),
            scaling: AdSpeedScaling::ElementMax,
            data: Box::new(|_| (0.0, 0.0)),
        }
    }

    pub fn with_dissipation(mut self, spec: DissipationSpec, scaling: AdSpeedScaling) -> Result<Self> {
        if spec.order() != self.sys.mesh().order() {
            return Err(Error::DimensionMismatch {
                expected: self.sys.mesh().order(),
                found: spec.order(),
            });
        }
        if let AdSpeedScaling::Frozen(c) = scaling {
            if !(c >= 0.0) || !c.is_finite() {
                return Err(Error::InvalidCoefficient { index: 0, value: c });
            }
        }
        self.ad = spec;
        self.scaling = scaling;
        Ok(self)
    }

    /// Boundary values `t -> (u(x0, t), u(x1, t))`.
    pub fn with_boundary_data(mut self, data: impl Fn(f64) -> (f64, f64) + 'a) -> Self {
        self.data = Box::new(data);
        self
    }

    pub fn system(&self) -> &GlobalSystem {
        self.sys
    }

    fn blocks(&self, t: f64) -> Result<Vec<Option<Matrix>>> {
        let active = activation_field(self.sys.mesh(), self.ad.activation(), t);
        element_ad_blocks(self.sys.mesh(), self.sys.ops(), &self.ad, &active)
    }

    /// Residual `F(V)` and, if requested, its Jacobian for one backward Euler step
    /// from `un` to time `t1`.
    fn residual(
        &self,
        v: &[f64],
        un: &[f64],
        dt: f64,
        t1: f64,
        blocks: &[Option<Matrix>],
        jacobian: bool,
    ) -> (Vec<f64>, Option<BandedMatrix>) {
        let sys = self.sys;
        let n = v.len();
        let p = sys.mesh().order();
        let mass = sys.mass();
        let flux = split_form_flux(sys, v);
        let mut f: Vec<f64> = (0..n).map(|i| mass[i] * (v[i] - un[i]) / dt + flux[i]).collect();
        let mut jac = if jacobian {
            let mut j = BandedMatrix::zeros(n, p, p);
            let qv = sys.qx().mul_vec(v);
            for i in 0..n {
                j.add(i, i, mass[i] / dt + qv[i] / 3.0);
                for c in sys.qx().row_range(i) {
                    let q = sys.qx().get(i, c);
                    if q != 0.0 {
                        j.add(i, c, (v[i] * q + 2.0 * q * v[c]) / 3.0);
                    }
                }
            }
            Some(j)
        } else {
            None
        };
        for (e, block) in blocks.iter().enumerate() {
            let Some(block) = block else { continue };
            let range = sys.mesh().element_nodes(e);
            let local = &v[range.clone()];
            let dv: Vec<f64> = (0..=p).map(|r| (0..=p).map(|c| block[(r, c)] * local[c]).sum()).collect();
            let (s, argmax) = match self.scaling {
                AdSpeedScaling::Frozen(c) => (c, None),
                AdSpeedScaling::ElementMax => {
                    let mut k = 0;
                    for (i, x) in local.iter().enumerate() {
                        if x.abs() > local[k].abs() {
                            k = i;
                        }
                    }
                    (local[k].abs(), Some(k))
                }
            };
            for r in 0..=p {
                f[range.start + r] += s * dv[r];
            }
            if let Some(j) = jac.as_mut() {
                for r in 0..=p {
                    for c in 0..=p {
                        j.add(range.start + r, range.start + c, s * block[(r, c)]);
                    }
                }
                if let Some(k) = argmax {
                    let sign = if local[k] > 0.0 {
                        1.0
                    } else if local[k] < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                    if sign != 0.0 {
                        for r in 0..=p {
                            j.add(range.start + r, range.start + k, sign * dv[r]);
                        }
                    }
                }
            }
        }
        let (g0, gn) = (self.data)(t1);
        if v[0] > 0.0 {
            f[0] += v[0] * (v[0] - g0);
            if let Some(j) = jac.as_mut() {
                j.add(0, 0, 2.0 * v[0] - g0);
            }
        }
        if v[n - 1] < 0.0 {
            f[n - 1] += -v[n - 1] * (v[n - 1] - gn);
            if let Some(j) = jac.as_mut() {
                j.add(n - 1, n - 1, -2.0 * v[n - 1] + gn);
            }
        }
        (f, jac)
    }

    /// Semi-discrete right-hand side `P U_t`.
    pub fn rhs(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        let blocks = self.blocks(t)?;
        // With un = u the time-derivative term vanishes for any dt.
        let (f, _) = self.residual(u, u, 1.0, t, &blocks, false);
        Ok(f.into_iter().map(|v| -v).collect())
    }

    fn newton_step(&self, un: &[f64], t0: f64, dt: f64, integrator: &TimeIntegrator) -> Option<Vec<f64>> {
        let t1 = t0 + dt;
        let blocks = self.blocks(t1).ok()?;
        let mut v = un.to_vec();
        for _ in 0..integrator.newton_max_iter {
            let (f, jac) = self.residual(&v, un, dt, t1, &blocks, true);
            let lu = jac.expect("requested").factor().ok()?;
            let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
            let d = lu.solve(&rhs).ok()?;
            for (vi, di) in v.iter_mut().zip(&d) {
                *vi += di;
            }
            let change = max_abs(&d);
            if !change.is_finite() {
                return None;
            }
            if change <= integrator.newton_tol {
                return Some(v);
            }
        }
        None
    }

    fn step_with_halving(&self, un: &[f64], t0: f64, dt: f64, depth: usize, integrator: &TimeIntegrator) -> Result<Vec<f64>> {
        if let Some(v) = self.newton_step(un, t0, dt, integrator) {
            return Ok(v);
        }
        if depth >= integrator.max_halvings {
            return Err(Error::NewtonFailure {
                time: t0,
                halvings: depth,
            });
        }
        log::debug!("Newton failed at t = {t0}, halving dt = {dt}");
        let half = 0.5 * dt;
        let mid = self.step_with_halving(un, t0, half, depth + 1, integrator)?;
        self.step_with_halving(&mid, t0 + half, half, depth + 1, integrator)
    }

    /// One backward Euler step, halving the step on Newton failure.
    pub fn advance(&self, state: &StateVector, integrator: &TimeIntegrator) -> Result<StateVector> {
        let n = self.sys.n_nodes();
        if state.u.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: state.u.len(),
            });
        }
        let u = self.step_with_halving(&state.u, state.t, integrator.dt, 0, integrator)?;
        let next = StateVector::new(u, state.t + integrator.dt);
        next.check_finite()?;
        Ok(next)
    }

    pub fn run(&self, state: StateVector, integrator: &TimeIntegrator, t_end: f64) -> Result<StateVector> {
        let (n, dt) = integrator.steps(state.t, t_end);
        let step = TimeIntegrator { dt, ..*integrator };
        let mut s = state;
        for _ in 0..n {
            s = self.advance(&s, &step)?;
        }
        Ok(s)
    }
}
