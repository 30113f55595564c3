//! Quantum statistical memory from memory-state overlaps.
//!
//! For a unifilar machine the memory states `|s_j⟩` satisfy
//! `⟨s_j|s_k⟩ = Σ_r √(P(r|j) P(r|k)) ⟨s_λ(j,r)|s_λ(k,r)⟩`; iterating this map
//! from the all-ones matrix gives, after `h` steps, the Bhattacharyya overlap
//! of the length-`h` future distributions.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::compmech::{entropy_bits, EpsilonMachine};
use crate::error::{Error, Result};

pub const DEFAULT_GRAM_TOL: f64 = 1e-12;
pub const DEFAULT_GRAM_MAX_ITER: usize = 100_000;
const EIG_FLOOR: f64 = 1e-14;
const NEG_TOL: f64 = 1e-10;

/// Overlaps `G_jk = ⟨s_j|s_k⟩` with convergence diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    g: Vec<Vec<f64>>,
    iterations: usize,
    residual: f64,
}

impl GramMatrix {
    /// Wrap overlaps computed elsewhere, e.g. from explicit memory states.
    pub fn from_overlaps(g: Vec<Vec<f64>>) -> Result<Self> {
        let n = g.len();
        if g.iter().any(|r| r.len() != n || r.iter().any(|x| !x.is_finite())) {
            return Err(Error::invalid("overlaps must form a finite square matrix"));
        }
        Ok(GramMatrix {
            g,
            iterations: 0,
            residual: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.len()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.g[j][k]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.g
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Max-abs change of the final update.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim();
        let m = DMatrix::from_fn(n, n, |j, k| self.g[j][k]);
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Unit diagonal, entries in `[0, 1]`, symmetric, PSD within 1e-10.
    pub fn check(&self) -> Result<()> {
        let n = self.dim();
        for j in 0..n {
            if self.g[j][j] != 1.0 {
                return Err(Error::InvalidGram(self.g[j][j]));
            }
            for k in 0..n {
                let x = self.g[j][k];
                if !(0.0..=1.0).contains(&x) || x != self.g[k][j] {
                    return Err(Error::InvalidGram(x));
                }
            }
        }
        let min = self.min_eigenvalue();
        if min < -NEG_TOL {
            return Err(Error::InvalidGram(min));
        }
        Ok(())
    }
}

/// One application of the overlap recursion.
pub fn gram_step(m: &EpsilonMachine, g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.num_states();
    let d = m.alphabet();
    let mut out = vec![vec![1.0; n]; n];
    for j in 0..n {
        for k in j + 1..n {
            let (ej, ek) = (m.emission(j), m.emission(k));
            let mut acc = 0.0;
            for r in 0..d {
                if ej[r] > 0.0 && ek[r] > 0.0 {
                    let (a, b) = (m.successor(j, r), m.successor(k, r));
                    if let (Some(a), Some(b)) = (a, b) {
                        acc += (ej[r] * ek[r]).sqrt() * g[a][b];
                    }
                }
            }
            let acc = acc.clamp(0.0, 1.0);
            out[j][k] = acc;
            out[k][j] = acc;
        }
    }
    out
}

/// Iterate the overlap recursion from all ones until the max-abs change is
/// at most `tol`.
pub fn gram_fixed_point(m: &EpsilonMachine, tol: f64, max_iter: usize) -> Result<GramMatrix> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tol must be positive"));
    }
    let n = m.num_states();
    let mut g = vec![vec![1.0; n]; n];
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let next = gram_step(m, &g);
        residual = next
            .iter()
            .flatten()
            .zip(g.iter().flatten())
            .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()));
        g = next;
        if residual <= tol {
            return Ok(GramMatrix {
                g,
                iterations: it,
                residual,
            });
        }
    }
    Err(Error::Convergence {
        context: "memory-state overlap recursion".into(),
        iterations: max_iter,
        residual,
    })
}

/// Entropy in bits of `ρ = Σ_j P_j |s_j⟩⟨s_j|`, via the spectrum of
/// `M_jk = √(P_j P_k) G_jk`.
pub fn quantum_memory(g: &GramMatrix, stationary: &[f64]) -> Result<f64> {
    let n = g.dim();
    if stationary.len() != n {
        return Err(Error::invalid("stationary distribution does not match the Gram matrix"));
    }
    if (stationary.iter().sum::<f64>() - 1.0).abs() > 1e-9 || stationary.iter().any(|p| *p < 0.0) {
        return Err(Error::invalid("stationary distribution is not normalized"));
    }
    let m = DMatrix::from_fn(n, n, |j, k| {
        (stationary[j] * stationary[k]).sqrt() * g.get(j, k)
    });
    let eig = SymmetricEigen::new(m).eigenvalues;
    if let Some(bad) = eig.iter().find(|&&x| x < -NEG_TOL) {
        return Err(Error::InvalidGram(*bad));
    }
    Ok(entropy_bits(
        eig.iter().map(|&x| if x < EIG_FLOOR { 0.0 } else { x }),
    ))
}

/// `C_q` of a machine together with its Gram matrix, default tolerances.
pub fn machine_quantum_memory(m: &EpsilonMachine) -> Result<(f64, GramMatrix)> {
    let g = gram_fixed_point(m, DEFAULT_GRAM_TOL, DEFAULT_GRAM_MAX_ITER)?;
    let cq = quantum_memory(&g, m.stationary())?;
    Ok((cq, g))
}
