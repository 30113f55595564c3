use ndarray::{Array2, ArrayView2};
use std::ops::Mul;

use super::C64;
use crate::error::{Error, Result};

/// Dense complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(Array2<C64>);

impl ComplexMatrix {
    pub fn from_array(a: Array2<C64>) -> Result<Self> {
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(ComplexMatrix(a))
    }

    /// Row-major entries.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Self::from_array(Array2::from_shape_vec((rows, cols), entries).expect("shape checked"))
    }

    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut((usize, usize)) -> C64) -> Self {
        ComplexMatrix(Array2::from_shape_fn((rows, cols), f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix(Array2::zeros((rows, cols)))
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix(Array2::eye(n))
    }

    pub fn diag_real(d: &[f64]) -> Self {
        let n = d.len();
        Self::from_fn(n, n, |(i, j)| if i == j { C64::new(d[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[[r, c]]
    }

    pub fn as_array(&self) -> &Array2<C64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView2<'_, C64> {
        self.0.view()
    }

    pub fn into_array(self) -> Array2<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.t().mapv(|z| z.conj()))
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.0.dot(&rhs.0))
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        self.0.dot(&ndarray::ArrayView1::from(v)).to_vec()
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let (ra, ca) = (self.rows(), self.cols());
        let (rb, cb) = (rhs.rows(), rhs.cols());
        Self::from_fn(ra * rb, ca * cb, |(i, j)| {
            self.0[[i / rb, j / cb]] * rhs.0[[i % rb, j % cb]]
        })
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        ComplexMatrix(self.0.mapv(|z| z * s))
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!(self.0.dim(), rhs.0.dim(), "shape mismatch");
        self.0
            .iter()
            .zip(rhs.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.rows();
        let mut d: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                d = d.max((self.0[[i, j]] - self.0[[j, i]].conj()).norm());
            }
        }
        d
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|z| z.im == 0.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}
