use ndarray::{Array2, Array3, ArrayView2};

use super::C64;
use crate::error::{Error, Result};

/// Rank-3 tensor `A[left, phys, right]` of one MPS site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTensor(Array3<C64>);

impl SiteTensor {
    pub fn from_array(a: Array3<C64>) -> Result<Self> {
        if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("site tensor has non-finite entries"));
        }
        Ok(SiteTensor(a.as_standard_layout().into_owned()))
    }

    pub(crate) fn from_array_unchecked(a: Array3<C64>) -> Self {
        SiteTensor(a.as_standard_layout().into_owned())
    }

    pub fn left_bond(&self) -> usize {
        self.0.dim().0
    }

    pub fn phys_dim(&self) -> usize {
        self.0.dim().1
    }

    pub fn right_bond(&self) -> usize {
        self.0.dim().2
    }

    pub fn array(&self) -> &Array3<C64> {
        &self.0
    }

    pub fn into_array(self) -> Array3<C64> {
        self.0
    }

    /// `(left·phys) × right` view, the left-grouped matricization.
    pub fn left_matrix(&self) -> ArrayView2<'_, C64> {
        let (l, p, r) = self.0.dim();
        self.0
            .view()
            .into_shape_with_order((l * p, r))
            .expect("site tensors are kept in standard layout")
    }

    /// `left × (phys·right)` view, the right-grouped matricization.
    pub fn right_matrix(&self) -> ArrayView2<'_, C64> {
        let (l, p, r) = self.0.dim();
        self.0
            .view()
            .into_shape_with_order((l, p * r))
            .expect("site tensors are kept in standard layout")
    }

    /// Matrix `A^s` for physical index `s`.
    pub fn slice(&self, s: usize) -> ArrayView2<'_, C64> {
        self.0.index_axis(ndarray::Axis(1), s)
    }

    /// Largest deviation of `Σ_s A^s† A^s` from the identity.
    pub fn left_orthonormality_defect(&self) -> f64 {
        let m = self.left_matrix();
        let g = m.t().mapv(|z| z.conj()).dot(&m);
        identity_defect(&g)
    }

    /// Largest deviation of `Σ_s A^s A^s†` from the identity.
    pub fn right_orthonormality_defect(&self) -> f64 {
        let m = self.right_matrix();
        let g = m.dot(&m.t().mapv(|z| z.conj()));
        identity_defect(&g)
    }
}

fn identity_defect(g: &Array2<C64>) -> f64 {
    g.indexed_iter().fold(0.0, |m, ((i, j), z)| {
        let target = if i == j { 1.0 } else { 0.0 };
        m.max((z - C64::new(target, 0.0)).norm())
    })
}
