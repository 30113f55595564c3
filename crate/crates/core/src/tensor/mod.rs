//! Dense complex linear algebra: matrices, rank-3 site tensors, truncated SVD,
//! Hermitian eigendecomposition and a Lanczos ground-state solver.

mod eig;
mod lanczos;
mod matrix;
mod site;
mod svd;

pub use eig::hermitian_eigs;
pub use lanczos::{lanczos_ground, lanczos_ground_with, LanczosConfig, LanczosOutcome};
pub use matrix::ComplexMatrix;
pub use site::SiteTensor;
pub use svd::{svd_arrays, svd_truncated, SvdResult, DEFAULT_SVD_CUTOFF};

pub use num_complex::Complex64 as C64;

#[cfg(test)]
pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub(crate) fn to_nalgebra(a: ndarray::ArrayView2<C64>) -> nalgebra::DMatrix<C64> {
    let (r, c) = a.dim();
    nalgebra::DMatrix::from_fn(r, c, |i, j| a[[i, j]])
}

/// `Σ conj(a_i) b_i`
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
