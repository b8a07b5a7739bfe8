//! Banded matrices and LU factorisation with partial pivoting.

use alloc::vec;
use alloc::vec::Vec;

use crate::fp::{dot2, max_abs};
use crate::{Error, Matrix, Result};

/// Square matrix with `kl` sub- and `ku` super-diagonals.
///
/// Rows are stored with room for `kl` extra super-diagonals so that the
/// factorisation can fill in place: row `i` holds columns `i - kl ..= i + kl + ku`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn from_diagonal(diag: &[f64], kl: usize, ku: usize) -> Self {
        let mut m = Self::zeros(diag.len(), kl, ku);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lower_bandwidth(&self) -> usize {
        self.kl
    }

    pub fn upper_bandwidth(&self) -> usize {
        self.ku
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.kl < i || j > i + self.kl + self.ku {
            return None;
        }
        Some(i * self.width + (j + self.kl - i))
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.kl >= i && j <= i + self.ku
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self.slot(i, j) {
            Some(s) if self.in_band(i, j) => self.data[s],
            _ => 0.0,
        }
    }

    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j) && i < self.n && j < self.n, "({i}, {j}) outside band");
        let s = self.slot(i, j).expect("in band");
        self.data[s] = v;
    }

    /// # Panics
    /// If `(i, j)` lies outside the band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(self.in_band(i, j) && i < self.n && j < self.n, "({i}, {j}) outside band");
        let s = self.slot(i, j).expect("in band");
        self.data[s] += v;
    }

    /// Column range of the stored band in row `i`.
    pub fn row_range(&self, i: usize) -> core::ops::Range<usize> {
        i.saturating_sub(self.kl)..(i + self.ku + 1).min(self.n)
    }

    /// `self += alpha * other`; bandwidths must fit.
    pub fn add_scaled(&mut self, alpha: f64, other: &BandedMatrix) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if other.kl > self.kl || other.ku > self.ku {
            return Err(Error::InvalidInput("bandwidth of summand exceeds target"));
        }
        for i in 0..self.n {
            for j in other.row_range(i) {
                let v = other.get(i, j);
                if v != 0.0 {
                    self.add(i, j, alpha * v);
                }
            }
        }
        Ok(())
    }

    /// Resets each diagonal entry to minus the sum of the off-diagonal entries of its row.
    pub fn zero_row_sums(&mut self) {
        for i in 0..self.n {
            let off = dot2(self.row_range(i).filter(|&j| j != i).map(|j| (self.get(i, j), 1.0)));
            self.set(i, i, -off);
        }
    }

    pub fn add_diagonal(&mut self, diag: &[f64], alpha: f64) {
        for (i, &d) in diag.iter().enumerate() {
            self.add(i, i, alpha * d);
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row_range(i).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// `b - A x` with each row evaluated in doubled precision.
    pub fn residual(&self, x: &[f64], b: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let terms = core::iter::once((b[i], 1.0)).chain(self.row_range(i).map(|j| (self.get(i, j), -x[j])));
                dot2(terms)
            })
            .collect()
    }

    pub fn transpose(&self) -> BandedMatrix {
        let mut t = BandedMatrix::zeros(self.n, self.ku, self.kl);
        for i in 0..self.n {
            for j in self.row_range(i) {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in self.row_range(i) {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    /// Largest absolute entry.
    pub fn amax(&self) -> f64 {
        max_abs(&self.data)
    }

    /// LU factorisation with partial pivoting.
    pub fn factor(&self) -> Result<BandedLu> {
        BandedLu::new(self.clone())
    }

    /// Solves `A x = b` by LU followed by iterative refinement.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        self.factor()?.solve_refined(self, b)
    }
}

/// In-place banded LU factors, `P A = L U`.
#[derive(Debug, Clone)]
pub struct BandedLu {
    lu: BandedMatrix,
    pivots: Vec<usize>,
}

const REFINEMENT_STEPS: usize = 3;

impl BandedLu {
    fn new(mut a: BandedMatrix) -> Result<Self> {
        let n = a.n;
        let (kl, ku) = (a.kl, a.ku);
        let mut pivots = vec![0; n];
        for k in 0..n {
            let last_row = (k + kl + 1).min(n);
            let last_col = (k + kl + ku + 1).min(n);
            let mut piv = k;
            let mut best = a.data[a.slot(k, k).expect("diagonal")].abs();
            for r in k + 1..last_row {
                let v = a.data[a.slot(r, k).expect("in band")].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular { row: k });
            }
            pivots[k] = piv;
            if piv != k {
                for c in k..last_col {
                    let s1 = a.slot(k, c).expect("in band");
                    let s2 = a.slot(piv, c).expect("in band");
                    a.data.swap(s1, s2);
                }
            }
            let diag = a.data[a.slot(k, k).expect("diagonal")];
            for r in k + 1..last_row {
                let sr = a.slot(r, k).expect("in band");
                let l = a.data[sr] / diag;
                a.data[sr] = l;
                if l == 0.0 {
                    continue;
                }
                for c in k + 1..last_col {
                    let u = a.data[a.slot(k, c).expect("in band")];
                    let s = a.slot(r, c).expect("in band");
                    a.data[s] -= l * u;
                }
            }
        }
        Ok(Self { lu: a, pivots })
    }

    pub fn dim(&self) -> usize {
        self.lu.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.lu.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let (kl, ku) = (self.lu.kl, self.lu.ku);
        let mut x = b.to_vec();
        for k in 0..n {
            x.swap(k, self.pivots[k]);
            let xk = x[k];
            for r in k + 1..(k + kl + 1).min(n) {
                x[r] -= self.lu.data[self.lu.slot(r, k).expect("in band")] * xk;
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for c in k + 1..(k + kl + ku + 1).min(n) {
                s -= self.lu.data[self.lu.slot(k, c).expect("in band")] * x[c];
            }
            x[k] = s / self.lu.data[self.lu.slot(k, k).expect("diagonal")];
        }
        Ok(x)
    }

    /// Solve followed by up to three refinement steps against `a` with
    /// residuals accumulated in doubled precision.
    pub fn solve_refined(&self, a: &BandedMatrix, b: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.solve(b)?;
        for _ in 0..REFINEMENT_STEPS {
            let r = a.residual(&x, b);
            let dx = self.solve(&r)?;
            let change = max_abs(&dx);
            for (xi, d) in x.iter_mut().zip(&dx) {
                *xi += d;
            }
            if change <= f64::EPSILON * max_abs(&x) {
                break;
            }
        }
        Ok(x)
    }
}
