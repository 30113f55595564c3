//! Brute-force reference path for small chains: dense Hamiltonians, exact
//! ground states, Born-rule word tables and reduced-density-matrix entropy.

use ndarray::Array2;

use crate::compmech::{entropy_bits, EpsilonMachine, WordDistribution};
use crate::error::{Error, Result};
use crate::models::{ops, BoseHubbardParams, IsingParams, MeasurementBasis, ModelParams};
use crate::mps::{MpsState, Window};
use crate::tensor::{hermitian_eigs, ComplexMatrix, C64};

/// Largest state vector handled here.
pub const MAX_STATE_DIM: usize = 1 << 14;
/// Largest dense matrix; a 2^12 complex matrix is already 256 MiB.
pub const MAX_MATRIX_DIM: usize = 1 << 12;

/// Normalized amplitude vector over `d^n` basis states, site 0 most significant.
#[derive(Debug, Clone)]
pub struct DenseState {
    amps: Vec<C64>,
    n: usize,
    d: usize,
}

impl DenseState {
    pub fn new(amps: Vec<C64>, n: usize, d: usize) -> Result<Self> {
        let dim = checked_dim(d, n, MAX_STATE_DIM)?;
        if amps.len() != dim {
            return Err(Error::invalid(format!(
                "expected {dim} amplitudes, got {}",
                amps.len()
            )));
        }
        let nrm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (nrm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("state norm {nrm} is not 1")));
        }
        Ok(DenseState { amps, n, d })
    }

    pub fn from_mps(s: &MpsState) -> Result<Self> {
        let mut amps = s.to_dense()?;
        let nrm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= nrm);
        DenseState::new(amps, s.len(), s.local_dim())
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    /// `|⟨self|other⟩|`
    pub fn fidelity(&self, other: &DenseState) -> f64 {
        crate::tensor::inner(&self.amps, &other.amps).norm()
    }

    /// Digits of basis index `i`, site 0 first.
    fn digits(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for k in (0..self.n).rev() {
            out[k] = i % self.d;
            i /= self.d;
        }
        out
    }

    /// `⟨(Σ_l n_l − target)²⟩`, reading each local state index as an occupation.
    pub fn number_variance(&self, target: f64) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let total: usize = self.digits(i).iter().sum();
                a.norm_sqr() * (total as f64 - target).powi(2)
            })
            .sum()
    }
}

fn checked_dim(d: usize, n: usize, cap: usize) -> Result<usize> {
    (d as u64)
        .checked_pow(n as u32)
        .filter(|&x| x as usize <= cap)
        .map(|x| x as usize)
        .ok_or_else(|| Error::Capacity(format!("{d}^{n} exceeds the dense limit {cap}")))
}

/// `op` acting on `site` of an `n`-site chain.
fn embed(ops_at: &[(usize, &ComplexMatrix)], n: usize, d: usize) -> ComplexMatrix {
    let id = ops::identity(d);
    let mut acc = ComplexMatrix::identity(1);
    for site in 0..n {
        let op = ops_at
            .iter()
            .find(|(s, _)| *s == site)
            .map(|(_, m)| *m)
            .unwrap_or(&id);
        acc = acc.kron(op);
    }
    acc
}

fn ising_dense(p: &IsingParams) -> Result<ComplexMatrix> {
    let (n, d) = (p.n, 2);
    let dim = checked_dim(d, n, MAX_MATRIX_DIM)?;
    let (x, z) = (ops::pauli_x(), ops::pauli_z());
    let (jx, bz) = p.pauli_couplings();
    let mut h = ComplexMatrix::zeros(dim, dim);
    for l in 0..n - 1 {
        h = h.add(&embed(&[(l, &x), (l + 1, &x)], n, d).scale(-jx));
    }
    for l in 0..n {
        h = h.add(&embed(&[(l, &z)], n, d).scale(-bz));
        h = h.add(&embed(&[(l, &x)], n, d).scale(-p.symmetry_break_h));
    }
    Ok(h)
}

fn bose_hubbard_dense(p: &BoseHubbardParams) -> Result<ComplexMatrix> {
    let (n, d) = (p.n, p.local_dim());
    let dim = checked_dim(d, n, MAX_MATRIX_DIM)?;
    let b = ops::annihilation(p.n_max);
    let bd = ops::creation(p.n_max);
    let num = ops::number(p.n_max);
    let inter = num.matmul(&num.add(&ops::identity(d).scale(-1.0))).scale(0.5 * p.u);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for l in 0..n - 1 {
        h = h.add(&embed(&[(l, &bd), (l + 1, &b)], n, d).scale(-p.j));
        h = h.add(&embed(&[(l, &b), (l + 1, &bd)], n, d).scale(-p.j));
    }
    for l in 0..n {
        h = h.add(&embed(&[(l, &inter)], n, d));
    }
    // penalty W (Σn − νN)², diagonal in the occupation basis
    let target = p.target_particles();
    let diag: Vec<f64> = (0..dim)
        .map(|mut i| {
            let mut total = 0;
            for _ in 0..n {
                total += i % d;
                i /= d;
            }
            p.penalty_weight * (total as f64 - target).powi(2)
        })
        .collect();
    Ok(h.add(&ComplexMatrix::diag_real(&diag)))
}

/// Dense Hamiltonian with the same symmetry-break and penalty terms as the MPO.
pub fn dense_hamiltonian(model: &ModelParams) -> Result<ComplexMatrix> {
    match model {
        ModelParams::Ising(p) => ising_dense(p),
        ModelParams::BoseHubbard(p) => bose_hubbard_dense(p),
    }
}

/// Lowest eigenpair of a dense Hermitian matrix acting on `n` sites of dimension `d`.
pub fn exact_ground(h: &ComplexMatrix, n: usize, d: usize) -> Result<(f64, DenseState)> {
    let dim = checked_dim(d, n, MAX_MATRIX_DIM)?;
    if h.rows() != dim || !h.is_square() {
        return Err(Error::invalid("matrix does not match the chain dimension"));
    }
    let (vals, vecs) = hermitian_eigs(h)?;
    let mut amps: Vec<C64> = (0..dim).map(|i| vecs.get(i, 0)).collect();
    // fix the global phase on the largest amplitude
    let k = (0..dim)
        .max_by(|&a, &b| amps[a].norm().total_cmp(&amps[b].norm()))
        .expect("non-empty");
    let phase = amps[k].conj() / amps[k].norm();
    let nrm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z = *z * phase / nrm);
    Ok((vals[0], DenseState::new(amps, n, d)?))
}

/// Ground state of a model by full diagonalization.
pub fn exact_model_ground(model: &ModelParams) -> Result<(f64, DenseState)> {
    let h = dense_hamiltonian(model)?;
    exact_ground(&h, model.n(), model.local_dim())
}

/// Born probabilities `⟨ψ|⊗_j |r_j⟩⟨r_j|ψ⟩` on `win`, other sites traced out.
pub fn exact_word_distribution(
    s: &DenseState,
    basis: &MeasurementBasis,
    win: Window,
) -> Result<WordDistribution> {
    let (n, d) = (s.n, s.d);
    if basis.dim() != d {
        return Err(Error::invalid("basis dimension does not match the state"));
    }
    if !win.fits(n) {
        return Err(Error::invalid("window exceeds the chain"));
    }
    // rotate every site: ψ'[.., r, ..] = Σ_s conj(U[s, r]) ψ[.., s, ..]
    let ud = basis.unitary().adjoint();
    let mut amps = s.amps.clone();
    for site in 0..n {
        let outer = d.pow(site as u32);
        let inner = d.pow((n - site - 1) as u32);
        let mut next = vec![C64::new(0.0, 0.0); amps.len()];
        for o in 0..outer {
            for r in 0..d {
                for sidx in 0..d {
                    let coef = ud.get(r, sidx);
                    if coef == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let src = (o * d + sidx) * inner;
                    let dst = (o * d + r) * inner;
                    for i in 0..inner {
                        next[dst + i] += coef * amps[src + i];
                    }
                }
            }
        }
        amps = next;
    }
    let w = win.len();
    let size = d.pow(w as u32);
    let tail = d.pow((n - win.end()) as u32);
    let mut probs = vec![0.0; size];
    for (i, a) in amps.iter().enumerate() {
        let word = (i / tail) % size;
        probs[word] += a.norm_sqr();
    }
    let mut wd = WordDistribution::from_weights(d, w, probs)?;
    wd.set_meta("window_start", win.start().to_string());
    wd.set_meta("window_length", w.to_string());
    Ok(wd)
}

/// Entanglement entropy in bits of the left half of an even chain.
pub fn exact_half_chain_entropy(s: &DenseState) -> Result<f64> {
    if s.n % 2 != 0 {
        return Err(Error::invalid("half-chain entropy needs an even chain"));
    }
    let half = s.d.pow((s.n / 2) as u32);
    let m = Array2::from_shape_vec((half, half), s.amps.clone()).expect("square split");
    let rho = m.dot(&m.t().mapv(|z| z.conj()));
    let (vals, _) = hermitian_eigs(&ComplexMatrix::from_array(rho)?)?;
    Ok(entropy_bits(vals.into_iter().map(|v| v.max(0.0))))
}

/// Overlaps of explicitly built memory states `|s_j⟩ = Σ_v √P(v|j) |v⟩`
/// over all futures `v` of length `h`.
pub fn memory_state_overlaps(m: &EpsilonMachine, h: usize) -> Result<Vec<Vec<f64>>> {
    let n = m.num_states();
    let d = m.alphabet();
    checked_dim(d, h, 1 << 22)?;
    let amps: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut out = vec![0.0; d.pow(h as u32)];
            let mut stack = vec![(j, 0usize, 0usize, 1.0f64)];
            while let Some((state, depth, word, p)) = stack.pop() {
                if depth == h {
                    out[word] = p.sqrt();
                    continue;
                }
                for r in 0..d {
                    let e = m.emission(state)[r];
                    if e > 0.0 {
                        let next = m.successor(state, r).expect("unifilar");
                        stack.push((next, depth + 1, word * d + r, p * e));
                    }
                }
            }
            out
        })
        .collect();
    Ok((0..n)
        .map(|j| {
            (0..n)
                .map(|k| amps[j].iter().zip(&amps[k]).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect())
}
