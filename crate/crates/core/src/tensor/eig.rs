use nalgebra::{DMatrix, SymmetricEigen};

use super::{to_nalgebra, ComplexMatrix, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues (ascending) and eigenvectors (as columns) of a Hermitian matrix.
///
/// Real symmetric input takes a real-arithmetic path.
pub fn hermitian_eigs(m: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::invalid("hermitian_eigs needs a non-empty square matrix"));
    }
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {defect:.3e})"
        )));
    }
    let n = m.rows();
    let (vals, vecs): (Vec<f64>, ComplexMatrix) = if m.is_real() {
        let a = m.as_array();
        let real = DMatrix::from_fn(n, n, |i, j| 0.5 * (a[[i, j]].re + a[[j, i]].re));
        let e = SymmetricEigen::new(real);
        let vals = e.eigenvalues.iter().copied().collect();
        let v = &e.eigenvectors;
        (vals, ComplexMatrix::from_fn(n, n, |(i, j)| C64::new(v[(i, j)], 0.0)))
    } else {
        let mut h = to_nalgebra(m.view());
        // symmetrize so the solver sees an exactly Hermitian matrix
        let ht = h.adjoint();
        h = (h + ht) * C64::new(0.5, 0.0);
        let e = SymmetricEigen::new(h);
        let vals = e.eigenvalues.iter().copied().collect();
        let v = &e.eigenvectors;
        (vals, ComplexMatrix::from_fn(n, n, |(i, j)| v[(i, j)]))
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
    let sorted_vals = order.iter().map(|&i| vals[i]).collect();
    let sorted_vecs = ComplexMatrix::from_fn(n, n, |(i, j)| vecs.get(i, order[j]));
    Ok((sorted_vals, sorted_vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let (vals, _) = hermitian_eigs(&x).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn diagonal_gives_standard_basis() {
        let m = ComplexMatrix::diag_real(&[0.8, 0.2]);
        let (vals, vecs) = hermitian_eigs(&m).unwrap();
        assert!((vals[0] - 0.2).abs() < 1e-15 && (vals[1] - 0.8).abs() < 1e-15);
        assert!((vecs.get(1, 0).norm() - 1.0).abs() < 1e-14);
        assert!((vecs.get(0, 1).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = ComplexMatrix::from_fn(6, 6, |_| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = a.add(&a.adjoint());
        let (vals, vecs) = hermitian_eigs(&h).unwrap();
        let hv = h.matmul(&vecs);
        for (j, &lam) in vals.iter().enumerate() {
            let res: f64 = (0..6)
                .map(|i| (hv.get(i, j) - vecs.get(i, j) * lam).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res <= 1e-10, "residual {res}");
        }
        let vv = vecs.adjoint().matmul(&vecs);
        assert!(vv.max_abs_diff(&ComplexMatrix::identity(6)) < 1e-12);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigs(&m), Err(Error::InvalidInput(_))));
    }
}
