use ndarray::{s, Array2, ArrayView2};

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Squared singular values at or below this are dropped by default.
pub const DEFAULT_SVD_CUTOFF: f64 = 1e-14;

/// `m ≈ U · diag(s) · V†` keeping the leading singular triplets.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub left_isometry: ComplexMatrix,
    pub singular_values: Vec<f64>,
    /// `V†`, with orthonormal rows.
    pub right_isometry: ComplexMatrix,
    /// Sum of squared discarded singular values.
    pub truncation_error: f64,
}

impl SvdResult {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut us = self.left_isometry.as_array().clone();
        for (j, &sv) in self.singular_values.iter().enumerate() {
            us.column_mut(j).mapv_inplace(|z| z * sv);
        }
        ComplexMatrix::from_array(us.dot(self.right_isometry.as_array()))
            .expect("finite product")
    }
}

/// Truncated SVD keeping `k = min(chi_max, #{σ² > cutoff}, rank)` values.
pub fn svd_truncated(m: &ComplexMatrix, chi_max: usize, cutoff: f64) -> Result<SvdResult> {
    let (u, s, vt, err) = svd_arrays(m.view(), chi_max, cutoff)?;
    Ok(SvdResult {
        left_isometry: ComplexMatrix::from_array(u)?,
        singular_values: s,
        right_isometry: ComplexMatrix::from_array(vt)?,
        truncation_error: err,
    })
}

/// Array-level SVD used by the MPS and DMRG kernels: `(U, s, V†, discarded weight)`.
pub fn svd_arrays(
    m: ArrayView2<C64>,
    chi_max: usize,
    cutoff: f64,
) -> Result<(Array2<C64>, Vec<f64>, Array2<C64>, f64)> {
    if chi_max == 0 {
        return Err(Error::invalid("chi_max must be at least 1"));
    }
    if !(cutoff >= 0.0) {
        return Err(Error::invalid("cutoff must be non-negative"));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    let (rows, cols) = m.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::invalid("empty matrix"));
    }

    let a = faer::Mat::<C64>::from_fn(rows, cols, |i, j| m[[i, j]]);
    let svd = a
        .thin_svd()
        .map_err(|_| Error::Internal(format!("SVD of a {rows}x{cols} matrix did not converge")))?;
    let k = rows.min(cols);
    let (fu, fv) = (svd.U(), svd.V());
    let u = Array2::from_shape_fn((rows, k), |(i, j)| fu[(i, j)]);
    let vt = Array2::from_shape_fn((k, cols), |(i, j)| fv[(j, i)].conj());
    let sv: Vec<f64> = (0..k).map(|j| svd.S().column_vector()[j].re).collect();

    let mut order: Vec<usize> = (0..sv.len()).collect();
    order.sort_by(|&a, &b| sv[b].total_cmp(&sv[a]));

    let above = order.iter().filter(|&&i| sv[i] * sv[i] > cutoff).count();
    let keep = above.min(chi_max);
    if keep == 0 {
        return Err(Error::DegenerateTruncation);
    }
    let truncation_error = order[keep..].iter().fold(0.0, |e, &i| e + sv[i] * sv[i]);

    let mut uk = Array2::zeros((rows, keep));
    let mut vk = Array2::zeros((keep, cols));
    let mut sk = Vec::with_capacity(keep);
    for (j, &i) in order[..keep].iter().enumerate() {
        uk.slice_mut(s![.., j]).assign(&u.slice(s![.., i]));
        vk.slice_mut(s![j, ..]).assign(&vt.slice(s![i, ..]));
        sk.push(sv[i]);
    }
    Ok((uk, sk, vk, truncation_error))
}
