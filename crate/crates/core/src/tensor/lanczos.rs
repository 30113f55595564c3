//! Lanczos iteration for the lowest eigenpair of a Hermitian linear map.
//!
//! Every new Krylov vector is reorthogonalized against the whole basis, with
//! a second pass when the first one cancels most of it. When the basis reaches `krylov_dim` vectors the iteration restarts
//! from the current Ritz vector. Convergence is declared on the explicitly
//! recomputed residual `‖Hx − θx‖ ≤ tol · max(1, |θ|)` for normalized `x`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{inner, norm, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LanczosConfig {
    /// Budget of operator applications.
    pub max_iter: usize,
    pub tol: f64,
    pub krylov_dim: usize,
    /// Return the best Ritz pair instead of an error when `max_iter` runs out.
    pub accept_unconverged: bool,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            max_iter: 2000,
            tol: 1e-12,
            krylov_dim: 100,
            accept_unconverged: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LanczosOutcome {
    pub energy: f64,
    /// Normalized eigenvector estimate.
    pub state: Vec<C64>,
    /// Operator applications used.
    pub iterations: usize,
    pub residual: f64,
    /// `‖Hx₀ − ⟨x₀|H|x₀⟩x₀‖` of the normalized seed.
    pub seed_residual: f64,
}

/// Lowest eigenpair of `apply` (which writes `H·x` into its second argument).
pub fn lanczos_ground<F>(
    apply: F,
    dim: usize,
    max_iter: usize,
    tol: f64,
    seed: &[C64],
) -> Result<(f64, Vec<C64>)>
where
    F: FnMut(&[C64], &mut [C64]),
{
    let cfg = LanczosConfig {
        max_iter,
        tol,
        ..LanczosConfig::default()
    };
    lanczos_ground_with(apply, dim, &cfg, seed).map(|o| (o.energy, o.state))
}

pub fn lanczos_ground_with<F>(
    mut apply: F,
    dim: usize,
    cfg: &LanczosConfig,
    seed: &[C64],
) -> Result<LanczosOutcome>
where
    F: FnMut(&[C64], &mut [C64]),
{
    if dim == 0 || seed.len() != dim {
        return Err(Error::invalid(format!(
            "lanczos: dimension {dim} with seed of length {}",
            seed.len()
        )));
    }
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(Error::invalid("lanczos: tol and max_iter must be positive"));
    }
    if seed.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("lanczos: non-finite seed"));
    }
    let seed_norm = norm(seed);
    if seed_norm == 0.0 {
        return Err(Error::invalid("lanczos: zero seed vector"));
    }

    let m = cfg.krylov_dim.clamp(1, dim);
    let mut x: Vec<C64> = seed.iter().map(|z| z / seed_norm).collect();
    let mut hx: Option<Vec<C64>> = None;
    let mut matvecs = 0usize;
    let mut best: Option<(f64, f64, Vec<C64>)> = None;
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut seed_residual = None;

    loop {
        let mut basis: Vec<Vec<C64>> = vec![x.clone()];
        let mut alpha: Vec<f64> = Vec::with_capacity(m);
        let mut beta: Vec<f64> = Vec::with_capacity(m);
        loop {
            let j = basis.len() - 1;
            match hx.take() {
                Some(v) if j == 0 => w.copy_from_slice(&v),
                _ => {
                    apply(&basis[j], &mut w);
                    matvecs += 1;
                }
            }
            let a = inner(&basis[j], &w).re;
            axpy(&mut w, C64::new(-a, 0.0), &basis[j]);
            if j > 0 {
                axpy(&mut w, C64::new(-beta[j - 1], 0.0), &basis[j - 1]);
            }
            // second pass only when the first removed most of w
            let mut b = norm(&w);
            for _ in 0..2 {
                for v in &basis {
                    let proj = inner(v, &w);
                    axpy(&mut w, -proj, v);
                }
                let after = norm(&w);
                let done = after > 0.7 * b;
                b = after;
                if done {
                    break;
                }
            }
            alpha.push(a);
            seed_residual.get_or_insert(b);

            let k = alpha.len();
            let check = k <= 30 || k % 3 == 0 || k == m;
            let scale_hint = alpha.iter().fold(1.0f64, |s, a| s.max(a.abs()));
            let breakdown = b <= 1e-14 * scale_hint;
            let full = k == m || matvecs >= cfg.max_iter;
            if !(check || breakdown || full) {
                basis.push(w.iter().map(|z| z / b).collect());
                beta.push(b);
                continue;
            }

            let (theta, y) = lowest_tridiagonal(&alpha, &beta);
            let estimate = b * y[k - 1].abs();
            if !(estimate <= 0.5 * cfg.tol * theta.abs().max(1.0) || breakdown || full) {
                basis.push(w.iter().map(|z| z / b).collect());
                beta.push(b);
                continue;
            }

            // Ritz vector and its true residual
            x.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for (yi, v) in y.iter().zip(&basis) {
                axpy(&mut x, C64::new(*yi, 0.0), v);
            }
            let nx = norm(&x);
            x.iter_mut().for_each(|z| *z /= nx);
            let mut hxv = vec![C64::new(0.0, 0.0); dim];
            apply(&x, &mut hxv);
            matvecs += 1;
            let rq = inner(&x, &hxv).re;
            let residual = hxv
                .iter()
                .zip(&x)
                .map(|(h, v)| (h - v * rq).norm_sqr())
                .sum::<f64>()
                .sqrt();
            if best.as_ref().map_or(true, |(r, _, _)| residual < *r) {
                best = Some((residual, rq, x.clone()));
            }
            if residual <= cfg.tol * rq.abs().max(1.0) {
                return Ok(LanczosOutcome {
                    energy: rq,
                    state: x,
                    iterations: matvecs,
                    residual,
                    seed_residual: seed_residual.unwrap_or(0.0),
                });
            }
            if matvecs >= cfg.max_iter {
                let (r, e, v) = best.expect("at least one residual computed");
                if cfg.accept_unconverged {
                    return Ok(LanczosOutcome {
                        energy: e,
                        state: v,
                        iterations: matvecs,
                        residual: r,
                        seed_residual: seed_residual.unwrap_or(0.0),
                    });
                }
                return Err(Error::Convergence {
                    context: format!("lanczos (dim {dim})"),
                    iterations: matvecs,
                    residual: r,
                });
            }
            hx = Some(hxv);
            break;
        }
    }
}

fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Lowest eigenpair of the symmetric tridiagonal matrix with diagonal `alpha`
/// and off-diagonal `beta` (`beta.len() == alpha.len() - 1`).
fn lowest_tridiagonal(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let k = alpha.len();
    if k == 1 {
        return (alpha[0], vec![1.0]);
    }
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    let e = SymmetricEigen::new(t);
    let (imin, &theta) = e
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    (theta, e.eigenvectors.column(imin).iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_map(d: Vec<f64>) -> impl FnMut(&[C64], &mut [C64]) {
        move |x, y| {
            for i in 0..x.len() {
                y[i] = x[i] * d[i];
            }
        }
    }

    #[test]
    fn diagonal_operator() {
        let seed = vec![C64::new(1.0, 0.0); 3];
        let (e, v) = lanczos_ground(diag_map(vec![-2.0, 0.0, 1.0]), 3, 100, 1e-12, &seed).unwrap();
        assert!((e + 2.0).abs() < 1e-12);
        assert!((v[0].norm() - 1.0).abs() < 1e-12);
        assert!((norm(&v) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_z() {
        let s = 1.0 / 2f64.sqrt();
        let seed = vec![C64::new(s, 0.0); 2];
        let (e, _) = lanczos_ground(diag_map(vec![1.0, -1.0]), 2, 50, 1e-12, &seed).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_seed_is_invalid() {
        let seed = vec![C64::new(0.0, 0.0); 2];
        let r = lanczos_ground(diag_map(vec![1.0, -1.0]), 2, 50, 1e-12, &seed);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn reports_convergence_failure() {
        // 200 evenly spaced eigenvalues cannot be resolved with 5 applications
        let d: Vec<f64> = (0..200).map(|i| i as f64 / 10.0).collect();
        let seed = vec![C64::new(1.0, 0.0); 200];
        let r = lanczos_ground(diag_map(d), 200, 5, 1e-12, &seed);
        match r {
            Err(Error::Convergence { residual, .. }) => assert!(residual > 0.0),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn resolves_near_degenerate_pair() {
        // doublet split by 2e-7 on top of a wide spectrum
        let mut d: Vec<f64> = (0..300).map(|i| 1.0 + i as f64 * 0.1).collect();
        d[0] = -1.0 - 1e-7;
        d[1] = -1.0 + 1e-7;
        let seed: Vec<C64> = (0..300).map(|i| C64::new(1.0 + (i % 7) as f64, 0.0)).collect();
        let cfg = LanczosConfig {
            max_iter: 5000,
            ..LanczosConfig::default()
        };
        let out = lanczos_ground_with(diag_map(d), 300, &cfg, &seed).unwrap();
        assert!((out.energy + 1.0 + 1e-7).abs() < 1e-12);
        assert!(out.state[1].norm() < 1e-5);
    }
}
