//! One-dimensional CG meshes and assembly of element matrices into global banded operators.

use alloc::vec::Vec;
use core::ops::Range;

use crate::banded::BandedMatrix;
use crate::basis::ReferenceElement;
use crate::sbp::{build_sbp, weighted_gram, SbpOperators};
use crate::{Error, Matrix, Result};

/// Placement of the element boundaries.
#[derive(Debug, Clone, PartialEq)]
pub enum Grading {
    Uniform,
    /// All `n_elements + 1` boundaries, ascending, including both domain ends.
    Explicit(Vec<f64>),
}

/// Element partition of `[x0, x1]` with shared interface nodes.
#[derive(Debug, Clone)]
pub struct Mesh1D {
    order: usize,
    boundaries: Vec<f64>,
    nodes: Vec<f64>,
    jacobians: Vec<f64>,
    reference: ReferenceElement,
}

pub fn build_mesh(x0: f64, x1: f64, n_elements: usize, p: usize, grading: &Grading) -> Result<Mesh1D> {
    if n_elements == 0 {
        return Err(Error::InvalidMesh("at least one element is required"));
    }
    if !(x0.is_finite() && x1.is_finite()) || x1 <= x0 {
        return Err(Error::InvalidMesh("domain must satisfy x0 < x1"));
    }
    let reference = ReferenceElement::new(p)?;
    let boundaries = match grading {
        Grading::Uniform => {
            let h = (x1 - x0) / n_elements as f64;
            let mut b: Vec<f64> = (0..=n_elements).map(|e| x0 + e as f64 * h).collect();
            b[n_elements] = x1;
            b
        }
        Grading::Explicit(b) => {
            if b.len() != n_elements + 1 {
                return Err(Error::DimensionMismatch {
                    expected: n_elements + 1,
                    found: b.len(),
                });
            }
            if b[0] != x0 || b[n_elements] != x1 {
                return Err(Error::InvalidMesh("explicit boundaries must start at x0 and end at x1"));
            }
            if !b.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidMesh("element boundaries must be strictly increasing"));
            }
            b.clone()
        }
    };
    let jacobians: Vec<f64> = boundaries.windows(2).map(|w| 0.5 * (w[1] - w[0])).collect();
    let mut nodes = Vec::with_capacity(n_elements * p + 1);
    for e in 0..n_elements {
        let (left, right) = (boundaries[e], boundaries[e + 1]);
        let start = if e == 0 { 0 } else { 1 };
        for &xi in &reference.nodes()[start..p] {
            nodes.push(left + (xi + 1.0) * jacobians[e]);
        }
        nodes.push(right);
    }
    nodes[0] = x0;
    Ok(Mesh1D {
        order: p,
        boundaries,
        nodes,
        jacobians,
        reference,
    })
}

impl Mesh1D {
    /// Uniform mesh on `[x0, x1]` with exactly `n_nodes` global nodes.
    pub fn uniform_with_nodes(x0: f64, x1: f64, n_nodes: usize, p: usize) -> Result<Self> {
        if p == 0 || n_nodes < p + 1 || (n_nodes - 1) % p != 0 {
            return Err(Error::InvalidMesh("node count must be n_elements * p + 1"));
        }
        build_mesh(x0, x1, (n_nodes - 1) / p, p, &Grading::Uniform)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_elements(&self) -> usize {
        self.jacobians.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.boundaries[0], self.boundaries[self.boundaries.len() - 1])
    }

    pub fn jacobians(&self) -> &[f64] {
        &self.jacobians
    }

    pub fn jacobian(&self, e: usize) -> f64 {
        self.jacobians[e]
    }

    pub fn reference(&self) -> &ReferenceElement {
        &self.reference
    }

    /// Global indices of the nodes of element `e`.
    pub fn element_nodes(&self, e: usize) -> Range<usize> {
        e * self.order..(e + 1) * self.order + 1
    }

    /// Diagonal of the global mass matrix, `sum_e w J_e` at shared nodes.
    pub fn mass(&self) -> Vec<f64> {
        let mut m = alloc::vec![0.0; self.n_nodes()];
        for e in 0..self.n_elements() {
            let j = self.jacobians[e];
            for (g, w) in self.element_nodes(e).zip(self.reference.weights()) {
                m[g] += w * j;
            }
        }
        m
    }

    /// Interpolates nodal values `u` at physical point `x`.
    pub fn interpolate(&self, u: &[f64], x: f64) -> f64 {
        let e = match self.boundaries[1..].iter().position(|&b| x <= b) {
            Some(e) => e,
            None => self.n_elements() - 1,
        };
        let xi = (x - self.boundaries[e]) / self.jacobians[e] - 1.0;
        self.reference.interpolate(&u[self.element_nodes(e)], xi.clamp(-1.0, 1.0))
    }
}

/// How an element matrix in the reference frame is mapped to the physical element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scaling {
    /// `x J_e`
    Mass,
    /// `x 1`
    Advection,
    /// `x 1 / J_e`
    Diffusion,
    /// `x 1`, physical coefficients already carry the Jacobian.
    Dissipation,
}

impl Scaling {
    pub fn factor(self, jacobian: f64) -> f64 {
        match self {
            Scaling::Mass => jacobian,
            Scaling::Advection | Scaling::Dissipation => 1.0,
            Scaling::Diffusion => 1.0 / jacobian,
        }
    }
}

/// Sums element matrices into a global matrix of half-bandwidth `p`.
///
/// `blocks` holds either one matrix shared by all elements or one per element.
pub fn assemble(mesh: &Mesh1D, blocks: &[Matrix], scaling: Scaling) -> Result<BandedMatrix> {
    let ne = mesh.n_elements();
    let p = mesh.order();
    if blocks.len() != 1 && blocks.len() != ne {
        return Err(Error::DimensionMismatch {
            expected: ne,
            found: blocks.len(),
        });
    }
    if let Some(b) = blocks.iter().find(|b| b.nrows() != p + 1 || b.ncols() != p + 1) {
        return Err(Error::DimensionMismatch {
            expected: p + 1,
            found: b.nrows(),
        });
    }
    let mut global = BandedMatrix::zeros(mesh.n_nodes(), p, p);
    for e in 0..ne {
        let block = if blocks.len() == 1 { &blocks[0] } else { &blocks[e] };
        add_block(&mut global, mesh, e, block, scaling.factor(mesh.jacobian(e)));
    }
    Ok(global)
}

pub(crate) fn add_block(global: &mut BandedMatrix, mesh: &Mesh1D, e: usize, block: &Matrix, factor: f64) {
    let base = mesh.element_nodes(e).start;
    for r in 0..block.nrows() {
        for c in 0..block.ncols() {
            let v = block[(r, c)];
            if v != 0.0 {
                global.add(base + r, base + c, factor * v);
            }
        }
    }
}

/// Globally merged operators on a mesh.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    mesh: Mesh1D,
    ops: SbpOperators,
    mass: Vec<f64>,
    qx: BandedMatrix,
}

impl GlobalSystem {
    pub fn new(mesh: Mesh1D) -> Result<Self> {
        let ops = build_sbp(mesh.reference());
        let mass = mesh.mass();
        let mut qx = assemble(&mesh, core::slice::from_ref(ops.qx()), Scaling::Advection)?;
        qx.zero_row_sums();
        Ok(Self { mesh, ops, mass, qx })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn ops(&self) -> &SbpOperators {
        &self.ops
    }

    pub fn n_nodes(&self) -> usize {
        self.mesh.n_nodes()
    }

    /// Diagonal of `P_g`.
    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn qx(&self) -> &BandedMatrix {
        &self.qx
    }

    /// `B_g = diag[-1, 0, .., 0, 1]`.
    pub fn boundary(&self) -> BandedMatrix {
        let n = self.n_nodes();
        let mut b = BandedMatrix::zeros(n, 0, 0);
        b.set(0, 0, -1.0);
        b.add(n - 1, n - 1, 1.0);
        b
    }

    /// Physical first-derivative rows at the two domain ends, as
    /// `(global column, value)` pairs.
    pub fn boundary_derivative_rows(&self) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
        let p = self.mesh.order();
        let ne = self.mesh.n_elements();
        let dx = self.ops.dx();
        let j0 = self.mesh.jacobian(0);
        let jn = self.mesh.jacobian(ne - 1);
        let base = self.mesh.element_nodes(ne - 1).start;
        let mut left: Vec<(usize, f64)> = (0..=p).map(|c| (c, dx[(0, c)] / j0)).collect();
        let mut right: Vec<(usize, f64)> = (0..=p).map(|c| (base + c, dx[(p, c)] / jn)).collect();
        left[0].1 = -left[1..].iter().map(|e| e.1).sum::<f64>();
        right[p].1 = -right[..p].iter().map(|e| e.1).sum::<f64>();
        (left, right)
    }

    /// Symmetric part `sum_e (sqrt(E) Dx)ᵀ P (sqrt(E) Dx) / J_e` of the diffusion operator
    /// for nodal coefficients `eps` (one value per global node).
    pub fn diffusion_gram(&self, eps: &[f64]) -> Result<BandedMatrix> {
        self.check_nodal(eps)?;
        let p = self.mesh.order();
        let mut g = BandedMatrix::zeros(self.n_nodes(), p, p);
        for e in 0..self.mesh.n_elements() {
            let range = self.mesh.element_nodes(e);
            let w: Vec<f64> = self.ops.mass().iter().zip(&eps[range]).map(|(m, ep)| m * ep).collect();
            let block = weighted_gram(self.ops.dx(), &w);
            add_block(&mut g, &self.mesh, e, &block, Scaling::Diffusion.factor(self.mesh.jacobian(e)));
        }
        g.zero_row_sums();
        Ok(g)
    }

    /// Boundary part `E B Dx` of the merged diffusion operator; interface
    /// contributions cancel, leaving only the two domain-end rows.
    pub fn diffusion_boundary(&self, eps: &[f64]) -> Result<BandedMatrix> {
        self.check_nodal(eps)?;
        let p = self.mesh.order();
        let n = self.n_nodes();
        let mut m = BandedMatrix::zeros(n, p, p);
        let (left, right) = self.boundary_derivative_rows();
        for (c, v) in left {
            m.add(0, c, -eps[0] * v);
        }
        for (c, v) in right {
            m.add(n - 1, c, eps[n - 1] * v);
        }
        Ok(m)
    }

    /// Merged `Qxx(eps) = E B Dx - sum_e (sqrt(E) Dx)ᵀ P (sqrt(E) Dx) / J_e`.
    pub fn diffusion(&self, eps: &[f64]) -> Result<BandedMatrix> {
        let mut m = self.diffusion_boundary(eps)?;
        m.add_scaled(-1.0, &self.diffusion_gram(eps)?)?;
        Ok(m)
    }

    fn check_nodal(&self, eps: &[f64]) -> Result<()> {
        if eps.len() != self.n_nodes() {
            return Err(Error::DimensionMismatch {
                expected: self.n_nodes(),
                found: eps.len(),
            });
        }
        for (index, &value) in eps.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCoefficient { index, value });
            }
        }
        Ok(())
    }
}

/// Largest entry of `|Qx_g + Qx_gᵀ - B_g|`.
pub fn global_sbp_check(sys: &GlobalSystem) -> f64 {
    let mut r = sys.qx().clone();
    r.add_scaled(1.0, &sys.qx().transpose()).expect("same shape");
    r.add_scaled(-1.0, &sys.boundary()).expect("diagonal fits");
    r.amax()
}
