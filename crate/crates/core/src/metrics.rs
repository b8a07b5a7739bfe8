//! Error norms, observed orders of accuracy and convergence tables.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::mesh::{GlobalSystem, Mesh1D};
use crate::solvers::exact::exact_steady;
use crate::solvers::{solve_steady, SteadyProblem};
use crate::{Error, Result};

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `sqrt((U - V)ᵀ P (U - V))` for a diagonal `P`.
pub fn p_norm_error(u: &[f64], v: &[f64], mass: &[f64]) -> Result<f64> {
    check_len(u, v)?;
    check_len(u, mass)?;
    let s: f64 = u.iter().zip(v).zip(mass).map(|((a, b), m)| (a - b) * (a - b) * m).sum();
    Ok(libm::sqrt(s))
}

/// `max |U - V|` over the nodes whose coordinate satisfies `keep`.
pub fn max_error_where(x: &[f64], u: &[f64], v: &[f64], keep: impl Fn(f64) -> bool) -> Result<f64> {
    check_len(u, v)?;
    check_len(x, u)?;
    Ok(x
        .iter()
        .zip(u.iter().zip(v))
        .filter(|(&xi, _)| keep(xi))
        .fold(0.0, |m, (_, (a, b))| m.max((a - b).abs())))
}

/// Largest excursion of `U` beyond the range of `V` over nodes within `radius` of `center`.
pub fn overshoot(x: &[f64], u: &[f64], v: &[f64], center: f64, radius: f64) -> Result<f64> {
    check_len(u, v)?;
    check_len(x, u)?;
    let mut umax = f64::NEG_INFINITY;
    let mut umin = f64::INFINITY;
    let mut vmax = f64::NEG_INFINITY;
    let mut vmin = f64::INFINITY;
    for ((&xi, &ui), &vi) in x.iter().zip(u).zip(v) {
        if (xi - center).abs() <= radius {
            umax = umax.max(ui);
            umin = umin.min(ui);
            vmax = vmax.max(vi);
            vmin = vmin.min(vi);
        }
    }
    if umax == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok((umax - vmax).max(vmin - umin).max(0.0))
}

/// `(log e2 - log e1) / (log N1 - log N2)`.
pub fn convergence_order(e1: f64, e2: f64, n1: f64, n2: f64) -> f64 {
    (libm::log10(e2) - libm::log10(e1)) / (libm::log10(n1) - libm::log10(n2))
}

/// Nearest node count `N` with `(N - 1)` divisible by `p` (at least one element);
/// ties go to the smaller count.
pub fn snap_node_count(requested: usize, p: usize) -> usize {
    let p = p.max(1);
    let below = ((requested.saturating_sub(1)) / p) * p + 1;
    let above = below + p;
    let below = below.max(p + 1);
    if requested <= below {
        return below;
    }
    if requested - below <= above - requested {
        below
    } else {
        above
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub requested_nodes: usize,
    pub nodes: usize,
    pub error: f64,
    /// Observed order against the previous row.
    pub order: Option<f64>,
}

/// Steady boundary-layer study: one row per requested node count.
pub fn make_table(a: f64, ratio: f64, p: usize, requested: &[usize]) -> Result<Vec<ConvergenceRow>> {
    let eps = a / ratio;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(requested.len());
    for &req in requested {
        let n = snap_node_count(req, p);
        if let Some(last) = rows.last() {
            if n <= last.nodes {
                return Err(Error::InvalidInput("snapped node counts must increase"));
            }
        }
        let sys = GlobalSystem::new(Mesh1D::uniform_with_nodes(0.0, 1.0, n, p)?)?;
        let u = solve_steady(&sys, &SteadyProblem::boundary_layer(a, eps))?.u;
        let v: Vec<f64> = sys.mesh().nodes().iter().map(|&x| exact_steady(x, a, eps)).collect();
        let error = p_norm_error(&u, &v, sys.mass())?;
        let order = rows.last().map(|r| convergence_order(r.error, error, r.nodes as f64, n as f64));
        rows.push(ConvergenceRow {
            requested_nodes: req,
            nodes: n,
            error,
            order,
        });
    }
    Ok(rows)
}

/// Whitespace-separated `N error order` rows; the first order is written as `nan`.
pub fn render_table_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(s, "{} {:.16e} {:.16e}", r.nodes, r.error, r.order.unwrap_or(f64::NAN));
    }
    s
}

/// Aligned text table with the requested and actual node counts.
pub fn render_table_text(title: &str, rows: &[ConvergenceRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{title}");
    let _ = writeln!(s, "{:>6} {:>6} {:>12} {:>8}", "N_req", "N", "error", "order");
    for r in rows {
        let order = match r.order {
            Some(o) => alloc::format!("{o:.2}"),
            None => String::from("-"),
        };
        let _ = writeln!(s, "{:>6} {:>6} {:>12.2e} {:>8}", r.requested_nodes, r.nodes, r.error, order);
    }
    s
}
