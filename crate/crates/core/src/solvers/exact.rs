//! Closed-form and root-finding reference solutions.

use core::f64::consts::PI;

/// `u(x) = 1 - (e^{x a/eps} - 1) / (e^{a/eps} - 1)`, evaluated without overflow.
pub fn exact_steady(x: f64, a: f64, eps: f64) -> f64 {
    let r = a / eps;
    if r == 0.0 {
        return 1.0 - x;
    }
    if r > 0.0 {
        // e^{(x-1) r} (1 - e^{-x r}) / (1 - e^{-r})
        1.0 - libm::exp((x - 1.0) * r) * libm::expm1(-x * r) / libm::expm1(-r)
    } else {
        1.0 - libm::expm1(x * r) / libm::expm1(r)
    }
}

/// Constant flux `a u - eps u_x = a e^{a/eps} / (e^{a/eps} - 1)` of [`exact_steady`].
///
/// It is the Robin datum at the inflow end and, since `u(1) = 0`, also the
/// Neumann datum `-eps u_x(1)` at the outflow end.
pub fn steady_flux(a: f64, eps: f64) -> f64 {
    let r = a / eps;
    if r == 0.0 {
        return eps;
    }
    -a / libm::expm1(-r)
}

/// Gaussian pulse followed by a step: `exp(-100 (x - 0.2)^2)` for `x <= 0.6`, `0.5` above.
pub fn initial_pulse_step(x: f64) -> f64 {
    if x <= 0.6 {
        libm::exp(-100.0 * (x - 0.2) * (x - 0.2))
    } else {
        0.5
    }
}

/// Pulse and step advected with speed `a`; the Gaussian branch supplies the inflow data.
pub fn exact_pulse_step(x: f64, t: f64, a: f64) -> f64 {
    initial_pulse_step(x - a * t)
}

/// Burgers solution for `u(x, 0) = sin(2 pi x)` (1-periodic), with the
/// stationary shock at `x = 0.5` once `t > 1 / (2 pi)`.
///
/// The value is `sin(2 pi xi)` where the characteristic foot `xi` solves
/// `xi + t sin(2 pi xi) = x` on the branch that reaches `x` from the same side
/// of the shock. The foot is bracketed and bisected, then `u` is polished with
/// Newton on `g(u) = -u + sin(2 pi (x - u t))`.
pub fn exact_burgers(x: f64, t: f64) -> f64 {
    let mut x = x - libm::floor(x);
    if x == 0.0 || x == 0.5 {
        return 0.0;
    }
    let mut sign = 1.0;
    if x > 0.5 {
        x = 1.0 - x;
        sign = -1.0;
    }
    if t <= 0.0 {
        return sign * libm::sin(2.0 * PI * x);
    }
    // Largest foot for which the characteristic map is still increasing.
    let fold = if 2.0 * PI * t > 1.0 {
        libm::acos(-1.0 / (2.0 * PI * t)) / (2.0 * PI)
    } else {
        0.5
    };
    let (mut lo, mut hi) = (0.0, fold);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mid + t * libm::sin(2.0 * PI * mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = libm::sin(2.0 * PI * 0.5 * (lo + hi));
    let g = |u: f64| -u + libm::sin(2.0 * PI * (x - u * t));
    let mut best = g(u).abs();
    for _ in 0..8 {
        if best <= 1e-16 {
            break;
        }
        let dg = -1.0 - 2.0 * PI * t * libm::cos(2.0 * PI * (x - u * t));
        let cand = u - g(u) / dg;
        let r = g(cand).abs();
        if !(r < best) {
            break;
        }
        u = cand;
        best = r;
    }
    sign * u
}

/// `-u + sin(2 pi (x - u t))`.
pub fn burgers_residual(u: f64, x: f64, t: f64) -> f64 {
    -u + libm::sin(2.0 * PI * (x - u * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn steady_examples() {
        for r in [1.0, 10.0, 40.0, 1e3] {
            assert!((exact_steady(0.0, 1.0, 1.0 / r) - 1.0).abs() < 1e-15);
            assert!(exact_steady(1.0, 1.0, 1.0 / r).abs() < 1e-15);
        }
        let expected = 1.0 - libm::expm1(20.0) / libm::expm1(40.0);
        assert!((exact_steady(0.5, 1.0, 1.0 / 40.0) - expected).abs() < 1e-15);
        assert!((expected - (1.0 - libm::exp(-20.0))).abs() < 1e-15);
        assert!((steady_flux(1.0, 0.1) - 1.000_045_401_991_009_2).abs() < 1e-14);
    }

    #[test]
    fn steady_flux_is_constant() {
        let (a, eps) = (1.0, 0.1);
        for x in [0.0, 0.3, 0.9, 1.0] {
            let h = 1e-6;
            let ux = (exact_steady(x + h, a, eps) - exact_steady(x - h, a, eps)) / (2.0 * h);
            let flux = a * exact_steady(x, a, eps) - eps * ux;
            assert!((flux - steady_flux(a, eps)).abs() < 1e-8);
        }
    }

    #[test]
    fn pulse_step_examples() {
        assert_eq!(initial_pulse_step(0.2), 1.0);
        assert_eq!(initial_pulse_step(0.7), 0.5);
        assert!((initial_pulse_step(0.6) / libm::exp(-16.0) - 1.0).abs() < 1e-13);
        assert_eq!(exact_pulse_step(0.8, 0.1, 1.0), 0.5);
    }

    #[test]
    fn burgers_examples() {
        for x in [0.1, 0.25, 0.8] {
            assert!((exact_burgers(x, 0.0) - libm::sin(2.0 * PI * x)).abs() < 1e-15);
        }
        for t in [0.0, 0.1, 0.2, 0.5] {
            assert_eq!(exact_burgers(0.5, t), 0.0);
        }
        // Scalar Newton oracle, independent of the bracketing.
        let mut u = libm::sin(2.0 * PI * 0.25);
        for _ in 0..50 {
            let g = burgers_residual(u, 0.25, 0.1);
            let dg = -1.0 - 2.0 * PI * 0.1 * libm::cos(2.0 * PI * (0.25 - 0.1 * u));
            u -= g / dg;
        }
        let v = exact_burgers(0.25, 0.1);
        assert!((u - v).abs() < 1e-14);
        assert!(burgers_residual(v, 0.25, 0.1).abs() <= 1e-13);
    }

    #[test]
    fn burgers_residual_and_antisymmetry() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..1000 {
            let x: f64 = rng.gen_range(0.0..1.0);
            let t: f64 = rng.gen_range(0.0..=0.5);
            let u = exact_burgers(x, t);
            assert!(burgers_residual(u, x, t).abs() <= 1e-13, "x={x} t={t}");
            let d: f64 = rng.gen_range(0.0..0.5);
            assert!((exact_burgers(0.5 + d, t) + exact_burgers(0.5 - d, t)).abs() <= 1e-12);
        }
    }

    #[test]
    fn burgers_shock_side() {
        // Past breaking the left state near the shock stays positive.
        let u = exact_burgers(0.49, 0.5);
        assert!(u > 0.3);
        assert!((exact_burgers(0.51, 0.5) + u).abs() < 1e-15);
    }
}
