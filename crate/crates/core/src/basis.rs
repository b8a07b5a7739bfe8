//! Gauss-Lobatto quadrature and nodal Lagrange bases on the reference element `[-1, 1]`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Matrix, Result};

/// Largest polynomial order accepted unless a caller asks for more.
pub const DEFAULT_MAX_ORDER: usize = 10;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Legendre polynomial `L_n(x)` and its derivative, by the three-term recurrence.
pub fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut d_prev, mut d) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        // L'_{k+1} = L'_{k-1} + (2k+1) L_k
        let d_next = d_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d)
}

fn check_order(p: usize, max_order: usize) -> Result<()> {
    if p < 1 || p > max_order {
        return Err(Error::OrderOutOfRange {
            order: p,
            max: max_order,
        });
    }
    Ok(())
}

/// Gauss-Lobatto nodes of order `p` (the roots of `(1 - x^2) L'_p(x)`), ascending.
pub fn gauss_lobatto_nodes(p: usize) -> Result<Vec<f64>> {
    gauss_lobatto_nodes_with_max(p, DEFAULT_MAX_ORDER)
}

pub fn gauss_lobatto_nodes_with_max(p: usize, max_order: usize) -> Result<Vec<f64>> {
    check_order(p, max_order)?;
    let mut nodes = Vec::with_capacity(p + 1);
    nodes.push(-1.0);
    let pf = p as f64;
    for j in 1..p {
        // Chebyshev-Lobatto initial guess, then Newton on L'_p. With
        // L''_p = (2x L'_p - p(p+1) L_p) / (1 - x^2) the update simplifies to
        // dx = (1 - x^2) L'_p / (2x L'_p - p(p+1) L_p).
        let mut x = -libm::cos(PI * j as f64 / pf);
        for _ in 0..NEWTON_MAX_ITER {
            let (l, dl) = legendre_and_derivative(p, x);
            let step = (1.0 - x * x) * dl / (2.0 * x * dl - pf * (pf + 1.0) * l);
            x -= step;
            if step.abs() < NEWTON_TOL {
                break;
            }
        }
        nodes.push(x);
    }
    nodes.push(1.0);
    // Exact symmetry about the origin.
    for k in 0..(p + 1) / 2 {
        let m = 0.5 * (nodes[p - k] - nodes[k]);
        nodes[k] = -m;
        nodes[p - k] = m;
    }
    if p % 2 == 0 {
        nodes[p / 2] = 0.0;
    }
    Ok(nodes)
}

/// Quadrature weights `w_i = 2 / (p (p+1) L_p(x_i)^2)` for the Gauss-Lobatto nodes.
pub fn gauss_lobatto_weights(p: usize, nodes: &[f64]) -> Vec<f64> {
    let scale = (p * (p + 1)) as f64;
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (l, _) = legendre_and_derivative(p, x);
            2.0 / (scale * l * l)
        })
        .collect();
    let n = weights.len();
    for k in 0..n / 2 {
        let m = 0.5 * (weights[k] + weights[n - 1 - k]);
        weights[k] = m;
        weights[n - 1 - k] = m;
    }
    weights
}

/// Barycentric weights `1 / prod_{m != j} (x_j - x_m)`.
pub fn barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    nodes
        .iter()
        .enumerate()
        .map(|(j, &xj)| {
            let prod = nodes
                .iter()
                .enumerate()
                .filter(|&(m, _)| m != j)
                .fold(1.0, |acc, (_, &xm)| acc * (xj - xm));
            1.0 / prod
        })
        .collect()
}

/// Sets every diagonal entry to minus the sum of the off-diagonal entries of its row,
/// so that the matrix annihilates constants to rounding.
pub(crate) fn zero_row_sums(m: &mut Matrix) {
    for k in 0..m.nrows() {
        let off: f64 = (0..m.ncols()).filter(|&j| j != k).map(|j| m[(k, j)]).sum();
        m[(k, k)] = -off;
    }
}

/// First-derivative Lagrange matrix: entry `(k, j)` is `l_j'(x_k)`.
fn first_derivative_matrix(nodes: &[f64]) -> Matrix {
    let n = nodes.len();
    let bary = barycentric_weights(nodes);
    let mut d = Matrix::zeros(n, n);
    for k in 0..n {
        for j in 0..n {
            if j != k {
                d[(k, j)] = bary[j] / bary[k] / (nodes[k] - nodes[j]);
            }
        }
    }
    zero_row_sums(&mut d);
    d
}

/// Derivative matrices `[D, D^2, ..., D^max_order]` where `D = L_xi^T`.
///
/// Higher orders are repeated products of the first-order matrix, which is
/// exact differentiation on the polynomial space of degree `p`.
pub fn lagrange_derivative_matrices(p: usize, nodes: &[f64], max_order: usize) -> Result<Vec<Matrix>> {
    if nodes.len() != p + 1 {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            found: nodes.len(),
        });
    }
    if max_order > p {
        return Err(Error::DegenerateOrder {
            derivative: max_order,
            order: p,
        });
    }
    let d = first_derivative_matrix(nodes);
    let mut out = Vec::with_capacity(max_order);
    if max_order == 0 {
        return Ok(out);
    }
    out.push(d.clone());
    for _ in 1..max_order {
        let mut next = &d * out.last().expect("non-empty");
        zero_row_sums(&mut next);
        out.push(next);
    }
    Ok(out)
}

/// Values of all Lagrange basis polynomials at `x` (barycentric form).
pub fn lagrange_basis_at(nodes: &[f64], bary: &[f64], x: f64) -> Vec<f64> {
    if let Some(k) = nodes.iter().position(|&xk| xk == x) {
        let mut out = alloc::vec![0.0; nodes.len()];
        out[k] = 1.0;
        return out;
    }
    let terms: Vec<f64> = nodes
        .iter()
        .zip(bary)
        .map(|(&xj, &wj)| wj / (x - xj))
        .collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / denom).collect()
}

/// Gauss-Lobatto reference element of order `p`.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    barycentric: Vec<f64>,
    derivatives: Vec<Matrix>,
}

impl ReferenceElement {
    pub fn new(p: usize) -> Result<Self> {
        Self::with_max_order(p, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(p: usize, max_order: usize) -> Result<Self> {
        let nodes = gauss_lobatto_nodes_with_max(p, max_order)?;
        let weights = gauss_lobatto_weights(p, &nodes);
        let barycentric = barycentric_weights(&nodes);
        let derivatives = lagrange_derivative_matrices(p, &nodes, p)?;
        Ok(Self {
            order: p,
            nodes,
            weights,
            barycentric,
            derivatives,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_nodes(&self) -> usize {
        self.order + 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `L_{xi^i}^T` for `1 <= i <= p`.
    pub fn derivative(&self, i: usize) -> Result<&Matrix> {
        if i == 0 || i > self.order {
            return Err(Error::DegenerateOrder {
                derivative: i,
                order: self.order,
            });
        }
        Ok(&self.derivatives[i - 1])
    }

    pub fn derivatives(&self) -> &[Matrix] {
        &self.derivatives
    }

    /// Evaluates the interpolant through `values` at reference coordinate `xi`.
    pub fn interpolate(&self, values: &[f64], xi: f64) -> f64 {
        lagrange_basis_at(&self.nodes, &self.barycentric, xi)
            .iter()
            .zip(values)
            .map(|(l, v)| l * v)
            .sum()
    }

    /// Basis values at `xi`.
    pub fn basis_at(&self, xi: f64) -> Vec<f64> {
        lagrange_basis_at(&self.nodes, &self.barycentric, xi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn nodes_low_orders() {
        assert_close(&gauss_lobatto_nodes(1).unwrap(), &[-1.0, 1.0], 0.0);
        assert_close(&gauss_lobatto_nodes(2).unwrap(), &[-1.0, 0.0, 1.0], 0.0);
        // L'_3 is proportional to 5x^2 - 1.
        let s = 1.0 / libm::sqrt(5.0);
        assert_close(&gauss_lobatto_nodes(3).unwrap(), &[-1.0, -s, s, 1.0], 1e-15);
        // L'_4 is proportional to 7x^3 - 3x.
        let r = libm::sqrt(3.0 / 7.0);
        assert_close(&gauss_lobatto_nodes(4).unwrap(), &[-1.0, -r, 0.0, r, 1.0], 1e-15);
    }

    #[test]
    fn nodes_reject_bad_orders() {
        assert_eq!(
            gauss_lobatto_nodes(0),
            Err(Error::OrderOutOfRange { order: 0, max: 10 })
        );
        assert!(gauss_lobatto_nodes(11).is_err());
        assert!(gauss_lobatto_nodes_with_max(12, 16).is_ok());
    }

    #[test]
    fn node_invariants() {
        for p in 1..=10 {
            let x = gauss_lobatto_nodes(p).unwrap();
            assert_eq!(x[0], -1.0);
            assert_eq!(x[p], 1.0);
            for k in 0..=p {
                assert_eq!(x[k], -x[p - k]);
            }
            assert!(x.windows(2).all(|w| w[0] < w[1]));
            for &xi in &x[1..p] {
                assert!(legendre_and_derivative(p, xi).1.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weights_low_orders() {
        let w = |p| gauss_lobatto_weights(p, &gauss_lobatto_nodes(p).unwrap());
        assert_close(&w(1), &[1.0, 1.0], 1e-15);
        // Moment equations for {1, x^2} with symmetric weights.
        assert_close(&w(2), &[1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0], 1e-15);
        // Moment equations through degree 5.
        assert_close(&w(3), &[1.0 / 6.0, 5.0 / 6.0, 5.0 / 6.0, 1.0 / 6.0], 1e-15);
    }

    #[test]
    fn quadrature_exact_through_degree_2p_minus_1() {
        for p in 1..=6 {
            let x = gauss_lobatto_nodes(p).unwrap();
            let w = gauss_lobatto_weights(p, &x);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(w.iter().all(|&wi| wi > 0.0));
            for m in 0..2 * p {
                let exact = if m % 2 == 1 { 0.0 } else { 2.0 / (m as f64 + 1.0) };
                let q: f64 = x.iter().zip(&w).map(|(&xi, &wi)| wi * libm::pow(xi, m as f64)).sum();
                assert!((q - exact).abs() < 1e-12, "p={p} m={m}: {q} vs {exact}");
            }
        }
    }

    #[test]
    fn derivative_matrix_examples() {
        let e1 = ReferenceElement::new(1).unwrap();
        let d1 = e1.derivative(1).unwrap();
        let expected = Matrix::from_row_slice(2, 2, &[-0.5, 0.5, -0.5, 0.5]);
        assert!((d1 - expected).amax() < 1e-15);

        let e2 = ReferenceElement::new(2).unwrap();
        let d = e2.derivative(1).unwrap();
        let expected = Matrix::from_row_slice(3, 3, &[-1.5, 2.0, -0.5, -0.5, 0.0, 0.5, 0.5, -2.0, 1.5]);
        assert!((d - expected).amax() < 1e-14);
        let d2 = e2.derivative(2).unwrap();
        for k in 0..3 {
            assert_close(&[d2[(k, 0)], d2[(k, 1)], d2[(k, 2)]], &[1.0, -2.0, 1.0], 1e-13);
        }
    }

    #[test]
    fn derivative_order_above_p_is_degenerate() {
        let x = gauss_lobatto_nodes(2).unwrap();
        assert_eq!(
            lagrange_derivative_matrices(2, &x, 3).unwrap_err(),
            Error::DegenerateOrder { derivative: 3, order: 2 }
        );
        let e = ReferenceElement::new(2).unwrap();
        assert!(e.derivative(3).is_err());
        assert!(e.derivative(0).is_err());
    }

    #[test]
    fn derivative_powers_and_accuracy() {
        for p in 1..=6 {
            let e = ReferenceElement::new(p).unwrap();
            let d = e.derivative(1).unwrap();
            for i in 1..=p {
                let power = (0..i - 1).fold(d.clone(), |acc, _| &acc * d);
                assert!((e.derivative(i).unwrap() - power).amax() < 1e-11 * libm::pow(10.0, i as f64 - 1.0).max(1.0));
            }
            for k in 0..=p {
                let row_sum: f64 = d.row(k).iter().sum();
                assert!(row_sum.abs() < 1e-12);
            }
            for m in 1..=p {
                let v: Vec<f64> = e.nodes().iter().map(|&x| libm::pow(x, m as f64)).collect();
                for k in 0..=p {
                    let dv: f64 = (0..=p).map(|j| d[(k, j)] * v[j]).sum();
                    let exact = m as f64 * libm::pow(e.nodes()[k], m as f64 - 1.0);
                    assert!((dv - exact).abs() < 1e-11, "p={p} m={m}");
                }
            }
        }
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for p in 1..=8 {
            let e = ReferenceElement::new(p).unwrap();
            let coeffs: Vec<f64> = (0..=p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let q = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            let values: Vec<f64> = e.nodes().iter().map(|&x| q(x)).collect();
            for _ in 0..50 {
                let x = rng.gen_range(-1.0..1.0);
                assert!((e.interpolate(&values, x) - q(x)).abs() < 1e-11);
            }
            assert!((e.interpolate(&values, 1.0) - q(1.0)).abs() < 1e-14);
        }
        let e = ReferenceElement::new(3).unwrap();
        assert_eq!(e.basis_at(e.nodes()[1]), vec![0.0, 1.0, 0.0, 0.0]);
    }
}
