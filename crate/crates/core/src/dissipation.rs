//! Galerkin-weighted artificial dissipation built from higher-derivative Gram matrices.
//!
//! On one element of order `p` the operator is
//! `D_AD = sum_i eps_i D_{xi^i}ᵀ P D_{xi^i}` (constant coefficients) or
//! `sum_i (sqrt(E_i) D_{xi^i})ᵀ P (sqrt(E_i) D_{xi^i})` (nodal coefficients).
//! Coefficients are given in the physical frame. The transformed coefficient
//! `eps_i J^(2i-1)` cancels against the `J^-i` of each physical derivative and
//! the `J` of the physical mass, so blocks are independent of element size.

use alloc::vec::Vec;
use core::fmt;

use crate::banded::BandedMatrix;
use crate::mesh::{add_block, Mesh1D};
use crate::sbp::{weighted_gram, SbpOperators};
use crate::{Error, Matrix, Result};

/// How coefficients are checked for stability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DissipationMode {
    /// Element-constant coefficients that may be negative inside the proven
    /// positivity regions (`p <= 3`).
    ConstantSigned,
    /// Nodal coefficients, all non-negative.
    NonnegativeVariable,
}

/// First violated stability inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionViolation {
    /// Human-readable inequality, e.g. `"e2 >= -e1/3"`.
    pub inequality: &'static str,
    /// 1-based derivative order of the offending coefficient.
    pub order: usize,
    pub value: f64,
}

impl fmt::Display for RegionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (e{} = {})", self.inequality, self.order, self.value)
    }
}

fn violation(inequality: &'static str, order: usize, value: f64) -> RegionViolation {
    RegionViolation {
        inequality,
        order,
        value,
    }
}

/// Checks coefficients `eps_1..eps_k` (`k <= p`, missing orders are zero)
/// against the positivity conditions for order `p`.
///
/// Non-negative coefficients are always accepted, since each term is a Gram
/// matrix. Signed coefficients are accepted for `p <= 3` inside the regions
///  - `p = 2`: `e1 > 0`, `e2 >= -e1/3`
///  - `p = 3`: additionally `e3 >= -e1/45 - e2/3`.
pub fn validate_coefficients(p: usize, coeffs: &[f64], mode: DissipationMode) -> core::result::Result<(), RegionViolation> {
    if coeffs.len() > p {
        return Err(violation("derivative order <= p", coeffs.len(), 0.0));
    }
    for (i, &c) in coeffs.iter().enumerate() {
        if !c.is_finite() {
            return Err(violation("coefficient finite", i + 1, c));
        }
    }
    let all_nonnegative = coeffs.iter().all(|&c| c >= 0.0);
    if all_nonnegative {
        return Ok(());
    }
    let first_negative = coeffs.iter().position(|&c| c < 0.0).expect("some negative");
    if mode == DissipationMode::NonnegativeVariable || p == 1 || p >= 4 {
        return Err(violation("ei >= 0", first_negative + 1, coeffs[first_negative]));
    }
    let e = |i: usize| coeffs.get(i - 1).copied().unwrap_or(0.0);
    if e(1) <= 0.0 {
        return Err(violation("e1 > 0", 1, e(1)));
    }
    if e(2) < -e(1) / 3.0 {
        return Err(violation("e2 >= -e1/3", 2, e(2)));
    }
    if p == 3 && e(3) < -e(1) / 45.0 - e(2) / 3.0 {
        return Err(violation("e3 >= -e1/45 - e2/3", 3, e(3)));
    }
    Ok(())
}

/// Where dissipation is switched on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Global,
    /// Elements with a node in `[center - radius, center + radius]`, for `t >= t_start`.
    Window { center: f64, radius: f64, t_start: f64 },
}

impl Activation {
    pub fn window(center: f64, radius: f64, t_start: f64) -> Result<Self> {
        if !(radius > 0.0) || !center.is_finite() || !t_start.is_finite() {
            return Err(Error::InvalidInput("window radius must be positive"));
        }
        Ok(Activation::Window {
            center,
            radius,
            t_start,
        })
    }

    /// Same window moved to a new center.
    pub fn recentered(self, center: f64) -> Self {
        match self {
            Activation::Window { radius, t_start, .. } => Activation::Window {
                center,
                radius,
                t_start,
            },
            Activation::Global => Activation::Global,
        }
    }
}

/// Coefficient layout.
#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    /// `eps_i`, `i = 1..=k`, constant over each active element.
    Constant(Vec<f64>),
    /// `eps_i(x)` at the global nodes: `fields[i - 1][node]`.
    Nodal(Vec<Vec<f64>>),
}

/// Artificial-dissipation coefficients together with their activation region.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipationSpec {
    order: usize,
    coefficients: Coefficients,
    activation: Activation,
}

impl DissipationSpec {
    /// Element-constant coefficients, validated as [`DissipationMode::ConstantSigned`].
    pub fn constant(p: usize, coeffs: Vec<f64>) -> Result<Self> {
        validate_coefficients(p, &coeffs, DissipationMode::ConstantSigned)?;
        Ok(Self {
            order: p,
            coefficients: Coefficients::Constant(coeffs),
            activation: Activation::Global,
        })
    }

    /// Nodal coefficient fields, all entries non-negative.
    pub fn nodal(p: usize, fields: Vec<Vec<f64>>) -> Result<Self> {
        if fields.len() > p {
            return Err(Error::DegenerateOrder {
                derivative: fields.len(),
                order: p,
            });
        }
        for (i, field) in fields.iter().enumerate() {
            if let Some(&v) = field.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
                return Err(violation("ei >= 0", i + 1, v).into());
            }
        }
        Ok(Self {
            order: p,
            coefficients: Coefficients::Nodal(fields),
            activation: Activation::Global,
        })
    }

    pub fn off(p: usize) -> Self {
        Self {
            order: p,
            coefficients: Coefficients::Constant(Vec::new()),
            activation: Activation::Global,
        }
    }

    pub fn with_activation(mut self, activation: Activation) -> Self {
        self.activation = activation;
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn mode(&self) -> DissipationMode {
        match self.coefficients {
            Coefficients::Constant(_) => DissipationMode::ConstantSigned,
            Coefficients::Nodal(_) => DissipationMode::NonnegativeVariable,
        }
    }

    /// True when every coefficient is zero.
    pub fn is_off(&self) -> bool {
        match &self.coefficients {
            Coefficients::Constant(c) => c.iter().all(|&v| v == 0.0),
            Coefficients::Nodal(f) => f.iter().all(|field| field.iter().all(|&v| v == 0.0)),
        }
    }
}

/// Coefficient `eps_i J^(2i-1)` of order `i` in the reference coordinate.
pub fn transformed_coefficient(eps: f64, i: usize, jacobian: f64) -> f64 {
    eps * libm::pow(jacobian, (2 * i - 1) as f64)
}

/// Element dissipation block for element-constant coefficients.
pub fn build_ad(ops: &SbpOperators, coeffs: &[f64], jacobian: f64) -> Result<Matrix> {
    let p = ops.order();
    validate_coefficients(p, coeffs, DissipationMode::ConstantSigned)?;
    check_jacobian(jacobian)?;
    let mut m = Matrix::zeros(p + 1, p + 1);
    for (k, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            m += ops.gram(k + 1)? * c;
        }
    }
    Ok(m)
}

/// Element dissipation block for nodal coefficients on the element's nodes:
/// `fields[i - 1][k]` is `eps_i` at local node `k`.
pub fn build_ad_nodal(ops: &SbpOperators, fields: &[&[f64]], jacobian: f64) -> Result<Matrix> {
    let p = ops.order();
    check_jacobian(jacobian)?;
    if fields.len() > p {
        return Err(Error::DegenerateOrder {
            derivative: fields.len(),
            order: p,
        });
    }
    let mut m = Matrix::zeros(p + 1, p + 1);
    for (k, field) in fields.iter().enumerate() {
        if field.len() != p + 1 {
            return Err(Error::DimensionMismatch {
                expected: p + 1,
                found: field.len(),
            });
        }
        if let Some(&v) = field.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(violation("ei >= 0", k + 1, v).into());
        }
        let w: Vec<f64> = ops.mass().iter().zip(field.iter()).map(|(pm, e)| pm * e).collect();
        m += weighted_gram(ops.derivative(k + 1)?, &w);
    }
    Ok(m)
}

fn check_jacobian(j: f64) -> Result<()> {
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::InvalidMesh("element Jacobian must be positive"));
    }
    Ok(())
}

/// Result of a numerical positive-semi-definiteness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub max_abs: f64,
    pub is_psd: bool,
}

/// Smallest eigenvalue of a symmetric matrix; PSD iff it is at least `-1e-10 max|A|`.
pub fn psd_check(m: &Matrix) -> Result<PsdReport> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let asymmetry = (m - m.transpose()).amax();
    if asymmetry > 1e-12 {
        return Err(Error::Asymmetric { asymmetry });
    }
    let sym = (m + m.transpose()) * 0.5;
    let max_abs = sym.amax();
    if m.nrows() == 0 {
        return Ok(PsdReport {
            min_eigenvalue: 0.0,
            max_abs,
            is_psd: true,
        });
    }
    let min_eigenvalue = nalgebra::SymmetricEigen::new(sym).eigenvalues.min();
    Ok(PsdReport {
        min_eigenvalue,
        max_abs,
        is_psd: min_eigenvalue >= -1e-10 * max_abs,
    })
}

/// Relative slack so that nodes lying on the window edge count as inside despite rounding.
const WINDOW_SLACK: f64 = 1e-12;

/// Per-element activation flags at time `t`.
pub fn activation_field(mesh: &Mesh1D, activation: Activation, t: f64) -> Vec<bool> {
    (0..mesh.n_elements())
        .map(|e| match activation {
            Activation::Global => true,
            Activation::Window {
                center,
                radius,
                t_start,
            } => t >= t_start && mesh.nodes()[mesh.element_nodes(e)].iter().any(|&x| (x - center).abs() <= radius + WINDOW_SLACK * (1.0 + center.abs())),
        })
        .collect()
}

/// Merged dissipation operator over the elements flagged in `active`.
pub fn assemble_ad(mesh: &Mesh1D, ops: &SbpOperators, spec: &DissipationSpec, active: &[bool]) -> Result<BandedMatrix> {
    let blocks = element_ad_blocks(mesh, ops, spec, active)?;
    let p = mesh.order();
    let mut g = BandedMatrix::zeros(mesh.n_nodes(), p, p);
    for (e, block) in blocks.iter().enumerate() {
        if let Some(b) = block {
            add_block(&mut g, mesh, e, b, 1.0);
        }
    }
    Ok(g)
}

/// Element blocks (`None` where inactive).
pub fn element_ad_blocks(mesh: &Mesh1D, ops: &SbpOperators, spec: &DissipationSpec, active: &[bool]) -> Result<Vec<Option<Matrix>>> {
    if spec.order() != mesh.order() || ops.order() != mesh.order() {
        return Err(Error::DimensionMismatch {
            expected: mesh.order(),
            found: spec.order(),
        });
    }
    if active.len() != mesh.n_elements() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_elements(),
            found: active.len(),
        });
    }
    let mut out = Vec::with_capacity(active.len());
    for (e, &on) in active.iter().enumerate() {
        if !on || spec.is_off() {
            out.push(None);
            continue;
        }
        let block = match spec.coefficients() {
            Coefficients::Constant(c) => build_ad(ops, c, mesh.jacobian(e))?,
            Coefficients::Nodal(fields) => {
                for f in fields {
                    if f.len() != mesh.n_nodes() {
                        return Err(Error::DimensionMismatch {
                            expected: mesh.n_nodes(),
                            found: f.len(),
                        });
                    }
                }
                let range = mesh.element_nodes(e);
                let local: Vec<&[f64]> = fields.iter().map(|f| &f[range.clone()]).collect();
                build_ad_nodal(ops, &local, mesh.jacobian(e))?
            }
        };
        out.push(Some(block));
    }
    Ok(out)
}
