//! Per-element summation-by-parts operators in the reference frame.

use alloc::vec::Vec;

use crate::basis::{zero_row_sums, ReferenceElement};
use crate::{Error, Matrix, Result};

/// `P`, `Qx`, `B` and the strong derivatives `D_{xi^i}` of one reference element.
#[derive(Debug, Clone)]
pub struct SbpOperators {
    order: usize,
    mass: Vec<f64>,
    qx: Matrix,
    b: Matrix,
    derivatives: Vec<Matrix>,
    grams: Vec<Matrix>,
}

impl SbpOperators {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_nodes(&self) -> usize {
        self.order + 1
    }

    /// Diagonal of `P`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn mass_matrix(&self) -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.mass))
    }

    pub fn qx(&self) -> &Matrix {
        &self.qx
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    /// Strong first derivative `Dx = P^-1 Qx`.
    pub fn dx(&self) -> &Matrix {
        &self.derivatives[0]
    }

    /// `D_{xi^i}` for `1 <= i <= p`.
    pub fn derivative(&self, i: usize) -> Result<&Matrix> {
        if i == 0 || i > self.order {
            return Err(Error::DegenerateOrder {
                derivative: i,
                order: self.order,
            });
        }
        Ok(&self.derivatives[i - 1])
    }

    /// Gram matrix `D_{xi^i}^T P D_{xi^i}`, symmetric with exactly zero row sums.
    pub fn gram(&self, i: usize) -> Result<&Matrix> {
        self.derivative(i)?;
        Ok(&self.grams[i - 1])
    }

    /// Replaces `Qx` (used to check that the residual helper sees perturbations).
    pub fn with_qx(mut self, qx: Matrix) -> Result<Self> {
        let n = self.n_nodes();
        if qx.nrows() != n || qx.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: qx.nrows(),
            });
        }
        self.qx = qx;
        Ok(self)
    }
}

/// Symmetric Gram matrix `Dᵀ W D` for a diagonal weight `W`, with exact zero row sums.
pub(crate) fn weighted_gram(d: &Matrix, weights: &[f64]) -> Matrix {
    let n = d.nrows();
    let mut g = Matrix::zeros(n, n);
    for r in 0..n {
        for c in r..n {
            let v: f64 = (0..n).map(|k| d[(k, r)] * weights[k] * d[(k, c)]).sum();
            g[(r, c)] = v;
            g[(c, r)] = v;
        }
    }
    zero_row_sums(&mut g);
    g
}

/// Builds `P = diag(w)`, `Qx = P Dx`, `B = diag[-1, 0, .., 0, 1]` and `Dx = L_xi^T`.
pub fn build_sbp(elem: &ReferenceElement) -> SbpOperators {
    let n = elem.n_nodes();
    let mass = elem.weights().to_vec();
    let derivatives = elem.derivatives().to_vec();
    let mut qx = Matrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            qx[(r, c)] = mass[r] * derivatives[0][(r, c)];
        }
    }
    zero_row_sums(&mut qx);
    let mut b = Matrix::zeros(n, n);
    b[(0, 0)] = -1.0;
    b[(n - 1, n - 1)] = 1.0;
    let grams = derivatives.iter().map(|d| weighted_gram(d, &mass)).collect();
    SbpOperators {
        order: elem.order(),
        mass,
        qx,
        b,
        derivatives,
        grams,
    }
}

/// Nodal diffusion coefficients on one element.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonField {
    values: Vec<f64>,
}

impl EpsilonField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCoefficient { index, value });
            }
        }
        Ok(Self { values })
    }

    pub fn constant(n_nodes: usize, eps: f64) -> Result<Self> {
        Self::new(alloc::vec![eps; n_nodes])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `E = diag(eps_i)`.
    pub fn e(&self) -> Matrix {
        Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values))
    }

    /// `sqrt(E)`, entrywise.
    pub fn sqrt_e(&self) -> Matrix {
        let roots: Vec<f64> = self.values.iter().map(|&v| libm::sqrt(v)).collect();
        Matrix::from_diagonal(&nalgebra::DVector::from_column_slice(&roots))
    }
}

/// Symmetric part `(sqrt(E) Dx)ᵀ P (sqrt(E) Dx)` of the weak second-derivative operator.
pub fn diffusion_gram(ops: &SbpOperators, eps: &EpsilonField) -> Result<Matrix> {
    let n = ops.n_nodes();
    if eps.values().len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: eps.values().len(),
        });
    }
    let w: Vec<f64> = ops.mass().iter().zip(eps.values()).map(|(p, e)| p * e).collect();
    Ok(weighted_gram(ops.dx(), &w))
}

/// `Qxx(eps) = E B Dx - (sqrt(E) Dx)ᵀ P (sqrt(E) Dx)` on one element.
pub fn build_qxx(ops: &SbpOperators, eps: &EpsilonField) -> Result<Matrix> {
    let gram = diffusion_gram(ops, eps)?;
    let boundary = eps.e() * ops.b() * ops.dx();
    Ok(boundary - gram)
}

/// Largest entry of `|Qx + Qxᵀ - B|`.
pub fn sbp_residual(ops: &SbpOperators) -> f64 {
    let r = ops.qx() + ops.qx().transpose() - ops.b();
    r.amax()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn ops(p: usize) -> SbpOperators {
        build_sbp(&ReferenceElement::new(p).unwrap())
    }

    #[test]
    fn qx_examples() {
        let q1 = Matrix::from_row_slice(2, 2, &[-0.5, 0.5, -0.5, 0.5]);
        assert!((ops(1).qx() - q1).amax() <= 1e-15);
        let q2 = Matrix::from_row_slice(3, 3, &[-3.0, 4.0, -1.0, -4.0, 0.0, 4.0, 1.0, -4.0, 3.0]) / 6.0;
        assert!((ops(2).qx() - q2).amax() <= 1e-14);
    }

    #[test]
    fn sbp_identity_and_accuracy() {
        for p in 1..=6 {
            let o = ops(p);
            assert!(sbp_residual(&o) <= 1e-13, "p={p}");
            assert!(o.mass().iter().all(|&w| w > 0.0));
            let minv = o.mass_matrix().try_inverse().unwrap();
            assert!((minv * o.qx() - o.dx()).amax() <= 1e-12);
            let x = ReferenceElement::new(p).unwrap().nodes().to_vec();
            for m in 1..=p {
                let v = nalgebra::DVector::from_iterator(p + 1, x.iter().map(|&xi| libm::pow(xi, m as f64)));
                let dv = o.dx() * v;
                for k in 0..=p {
                    let exact = m as f64 * libm::pow(x[k], m as f64 - 1.0);
                    assert!((dv[k] - exact).abs() <= 1e-11);
                }
            }
        }
    }

    #[test]
    fn sbp_residual_sees_perturbation() {
        let o = ops(2);
        let mut q = o.qx().clone();
        q[(0, 1)] += 1e-6;
        let off = o.clone().with_qx(q).unwrap();
        assert!((sbp_residual(&off) - 1e-6).abs() < 1e-12);
        // A diagonal entry enters Qx + Qxᵀ twice.
        let mut q = o.qx().clone();
        q[(0, 0)] += 1e-6;
        let diag = o.with_qx(q).unwrap();
        assert!((sbp_residual(&diag) - 2e-6).abs() < 1e-12);
        assert!(sbp_residual(&ops(4)) <= 1e-13);
    }

    #[test]
    fn qxx_zero_and_unit_eps() {
        let o = ops(2);
        let zero = build_qxx(&o, &EpsilonField::constant(3, 0.0).unwrap()).unwrap();
        assert_eq!(zero.amax(), 0.0);
        let one = EpsilonField::constant(3, 1.0).unwrap();
        let gram = diffusion_gram(&o, &one).unwrap();
        let expected = Matrix::from_row_slice(3, 3, &[7.0, -8.0, 1.0, -8.0, 16.0, -8.0, 1.0, -8.0, 7.0]) / 6.0;
        assert!((&gram - expected).amax() <= 1e-14);
        let qxx = build_qxx(&o, &one).unwrap();
        assert!((qxx - (o.b() * o.dx() - gram)).amax() <= 1e-14);
    }

    #[test]
    fn negative_eps_rejected() {
        assert_eq!(
            EpsilonField::new(alloc::vec![0.1, -1.0, 0.0]),
            Err(Error::InvalidCoefficient { index: 1, value: -1.0 })
        );
    }

    // Weak form of eps * u'' against l_j: eps [l_j u']_{-1}^{1} - eps ∫ l_j' u' dxi,
    // integrated with a 12-point Gauss-Lobatto rule (exact for the degrees involved).
    #[test]
    fn qxx_matches_weak_form_oracle() {
        let fine = ReferenceElement::with_max_order(12, 12).unwrap();
        for p in 2..=6 {
            let elem = ReferenceElement::new(p).unwrap();
            let o = build_sbp(&elem);
            let eps = 0.37;
            let qxx = build_qxx(&o, &EpsilonField::constant(p + 1, eps).unwrap()).unwrap();
            let u = nalgebra::DVector::from_iterator(p + 1, elem.nodes().iter().map(|&x| x * x));
            let action = qxx * u;
            for j in 0..=p {
                let mut unit = alloc::vec![0.0; p + 1];
                unit[j] = 1.0;
                let dl: Vec<f64> = (0..=p).map(|k| o.dx()[(k, j)]).collect();
                let boundary = eps * (unit[p] * 2.0 - unit[0] * (-2.0));
                let integral: f64 = fine
                    .nodes()
                    .iter()
                    .zip(fine.weights())
                    .map(|(&x, &w)| w * elem.interpolate(&dl, x) * 2.0 * x)
                    .sum();
                let oracle = boundary - eps * integral;
                assert!((action[j] - oracle).abs() <= 1e-10, "p={p} j={j}");
            }
        }
    }

    #[test]
    fn gram_positive_on_random_vectors() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        for p in 1..=6 {
            let o = ops(p);
            let g = diffusion_gram(&o, &EpsilonField::constant(p + 1, 1.0).unwrap()).unwrap();
            for _ in 0..100 {
                let v = nalgebra::DVector::from_fn(p + 1, |_, _| rng.gen_range(-1.0..1.0));
                assert!(v.dot(&(&g * &v)) >= -1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn negative_part_is_nsd(p in 1usize..=6, seed in any::<u64>()) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let o = ops(p);
            let eps = EpsilonField::new((0..=p).map(|_| rng.gen_range(0.0..2.0)).collect()).unwrap();
            let g = -diffusion_gram(&o, &eps).unwrap();
            let eig = nalgebra::SymmetricEigen::new(g).eigenvalues;
            prop_assert!(eig.max() <= 1e-12);
        }
    }
}
