//! Third-order WENO finite differences with Lax-Friedrichs flux splitting and SSP-RK3.

use alloc::vec::Vec;

/// Flux function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flux {
    /// `f(u) = a u`
    Linear(f64),
    /// `f(u) = u^2 / 2`
    Burgers,
}

impl Flux {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Flux::Linear(a) => a * u,
            Flux::Burgers => 0.5 * u * u,
        }
    }

    pub fn speed(self, u: f64) -> f64 {
        match self {
            Flux::Linear(a) => a,
            Flux::Burgers => u,
        }
    }
}

/// Scheme parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weno3 {
    pub flux: Flux,
    /// Regularisation in the smoothness weights.
    pub eps: f64,
    pub cfl: f64,
    /// Use the optimal linear weights (1/3, 2/3) instead of the nonlinear ones.
    pub linear_weights: bool,
}

impl Weno3 {
    pub fn new(flux: Flux) -> Self {
        Self {
            flux,
            eps: 1e-6,
            cfl: 0.4,
            linear_weights: false,
        }
    }

    /// Reconstruction at `i + 1/2` from the left-biased stencil `(q[i-1], q[i], q[i+1])`.
    fn reconstruct(&self, qm: f64, q0: f64, qp: f64) -> f64 {
        let r0 = -0.5 * qm + 1.5 * q0;
        let r1 = 0.5 * q0 + 0.5 * qp;
        if self.linear_weights {
            return (r0 + 2.0 * r1) / 3.0;
        }
        let b0 = (q0 - qm) * (q0 - qm);
        let b1 = (qp - q0) * (qp - q0);
        let a0 = (1.0 / 3.0) / ((self.eps + b0) * (self.eps + b0));
        let a1 = (2.0 / 3.0) / ((self.eps + b1) * (self.eps + b1));
        (a0 * r0 + a1 * r1) / (a0 + a1)
    }

    /// `du/dt` on the nodes, given two ghost values on each side:
    /// `left = [u_{-2}, u_{-1}]`, `right = [u_{N}, u_{N+1}]`.
    pub fn rhs(&self, u: &[f64], dx: f64, left: [f64; 2], right: [f64; 2]) -> Vec<f64> {
        let mut g = Vec::with_capacity(u.len() + 4);
        g.extend_from_slice(&left);
        g.extend_from_slice(u);
        g.extend_from_slice(&right);
        let alpha = g.iter().fold(0.0f64, |m, &v| m.max(self.flux.speed(v).abs()));
        let fp: Vec<f64> = g.iter().map(|&v| 0.5 * (self.flux.eval(v) + alpha * v)).collect();
        let fm: Vec<f64> = g.iter().map(|&v| 0.5 * (self.flux.eval(v) - alpha * v)).collect();
        // Interface between extended indices j and j + 1, for j = 1 ..= len - 3.
        let m = g.len();
        let interface: Vec<f64> = (1..m - 2)
            .map(|j| self.reconstruct(fp[j - 1], fp[j], fp[j + 1]) + self.reconstruct(fm[j + 2], fm[j + 1], fm[j]))
            .collect();
        // Node i sits at extended index i + 2, between interfaces (i + 1) and (i + 2).
        (0..u.len()).map(|i| -(interface[i + 1] - interface[i]) / dx).collect()
    }

    /// Largest stable step for the configured CFL number.
    pub fn stable_dt(&self, u: &[f64], dx: f64) -> f64 {
        let s = u.iter().fold(0.0f64, |m, &v| m.max(self.flux.speed(v).abs()));
        if s == 0.0 {
            f64::INFINITY
        } else {
            self.cfl * dx / s
        }
    }

    /// One SSP-RK3 step from time `t`; `ghosts(u, t)` supplies the ghost values.
    pub fn advance<G>(&self, u: &[f64], t: f64, dt: f64, dx: f64, ghosts: &G) -> Vec<f64>
    where
        G: Fn(&[f64], f64) -> ([f64; 2], [f64; 2]),
    {
        let s = u.iter().fold(0.0f64, |m, &v| m.max(self.flux.speed(v).abs()));
        if s * dt > self.cfl * dx * (1.0 + 1e-12) {
            log::warn!("WENO3 step exceeds CFL {}: dt = {dt}, dx = {dx}, max speed = {s}", self.cfl);
        }
        let l = |v: &[f64], t: f64| {
            let (gl, gr) = ghosts(v, t);
            self.rhs(v, dx, gl, gr)
        };
        let k1 = l(u, t);
        let u1: Vec<f64> = u.iter().zip(&k1).map(|(a, k)| a + dt * k).collect();
        let k2 = l(&u1, t + dt);
        let u2: Vec<f64> = (0..u.len()).map(|i| 0.75 * u[i] + 0.25 * (u1[i] + dt * k2[i])).collect();
        let k3 = l(&u2, t + 0.5 * dt);
        (0..u.len()).map(|i| u[i] / 3.0 + 2.0 / 3.0 * (u2[i] + dt * k3[i])).collect()
    }

    /// Integrates from `t0` to `t_end` with CFL-limited steps.
    pub fn solve<G>(&self, u0: &[f64], dx: f64, t0: f64, t_end: f64, ghosts: &G) -> Vec<f64>
    where
        G: Fn(&[f64], f64) -> ([f64; 2], [f64; 2]),
    {
        let mut u = u0.to_vec();
        let mut t = t0;
        while t < t_end - 1e-14 {
            let dt = self.stable_dt(&u, dx).min(t_end - t);
            u = self.advance(&u, t, dt, dx, ghosts);
            t += dt;
        }
        u
    }
}

/// Quadratic extrapolation of the two ghost values past the right end.
pub fn extrapolated_right(u: &[f64]) -> [f64; 2] {
    let n = u.len();
    let (a, b, c) = (u[n - 1], u[n - 2], u[n - 3]);
    [3.0 * a - 3.0 * b + c, 6.0 * a - 8.0 * b + 3.0 * c]
}

/// Uniform grid `x_i = x0 + i (x1 - x0) / (n - 1)`.
pub fn uniform_grid(x0: f64, x1: f64, n: usize) -> (Vec<f64>, f64) {
    let dx = (x1 - x0) / (n - 1) as f64;
    let mut x: Vec<f64> = (0..n).map(|i| x0 + i as f64 * dx).collect();
    x[n - 1] = x1;
    (x, dx)
}
