//! Matrix-product states: canonical form, Schmidt spectra, basis rotation and
//! exact window word statistics.

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::compmech::WordDistribution;
use crate::contract::{extend_left, trivial_env};
use crate::error::{Error, Result};
use crate::models::{MeasurementBasis, MpoOperator};
use crate::tensor::{svd_arrays, SiteTensor, C64};
use crate::Exec;

const NORM_TOL: f64 = 1e-10;
const MAX_WORDS: u64 = 1 << 26;
const MAX_DENSE: u64 = 1 << 14;

/// Consecutive sites `start..start + len` (0-based).
/// Squared Schmidt values at or below this are dropped by [`MpsState::canonicalize`].
/// Far below the SVD kernel default, so that kept states stay exact to ~1e-12.
pub const SCHMIDT_CUTOFF: f64 = 1e-24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    start: usize,
    len: usize,
}

impl Window {
    pub fn new(start: usize, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("window length must be at least 1"));
        }
        Ok(Window { start, len })
    }

    /// Window of `len` sites centred on a chain of `n`: start = n/2 − len/2.
    pub fn centered(n: usize, len: usize) -> Result<Self> {
        if len == 0 || len > n {
            return Err(Error::invalid(format!(
                "window of {len} sites does not fit a chain of {n}"
            )));
        }
        Window::new(n / 2 - len / 2, len)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// One past the last site.
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn contains(&self, site: usize) -> bool {
        site >= self.start && site < self.end()
    }

    pub fn fits(&self, n: usize) -> bool {
        self.end() <= n
    }
}

/// Site tensors plus (after canonicalization) the Schmidt values of every bond.
#[derive(Debug, Clone)]
pub struct MpsState {
    sites: Vec<SiteTensor>,
    bonds: Vec<Vec<f64>>,
    center: Option<usize>,
    chi_max: usize,
    d: usize,
}

impl MpsState {
    /// Unnormalized state from raw tensors; no canonical form is assumed.
    pub fn from_sites(sites: Vec<SiteTensor>, chi_max: usize) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::invalid("an MPS needs at least one site"));
        }
        if chi_max == 0 {
            return Err(Error::invalid("chi_max must be at least 1"));
        }
        let d = sites[0].phys_dim();
        if sites[0].left_bond() != 1 || sites[sites.len() - 1].right_bond() != 1 {
            return Err(Error::invalid("boundary bonds must have dimension 1"));
        }
        for (i, w) in sites.windows(2).enumerate() {
            if w[0].right_bond() != w[1].left_bond() {
                return Err(Error::invalid(format!("bond {i} dimensions disagree")));
            }
        }
        if sites.iter().any(|s| s.phys_dim() != d) {
            return Err(Error::invalid("all sites must share the local dimension"));
        }
        let n = sites.len();
        Ok(MpsState {
            sites,
            bonds: vec![Vec::new(); n - 1],
            center: None,
            chi_max,
            d,
        })
    }

    pub(crate) fn from_canonical_parts(
        sites: Vec<SiteTensor>,
        bonds: Vec<Vec<f64>>,
        center: usize,
        chi_max: usize,
    ) -> Self {
        let d = sites[0].phys_dim();
        MpsState {
            sites,
            bonds,
            center: Some(center),
            chi_max,
            d,
        }
    }

    /// Product of normalized local kets.
    pub fn product_state(kets: &[Vec<C64>]) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::invalid("no local kets"));
        }
        let d = kets[0].len();
        let mut sites = Vec::with_capacity(kets.len());
        for (i, k) in kets.iter().enumerate() {
            if k.len() != d {
                return Err(Error::invalid("kets must share one dimension"));
            }
            let nrm: f64 = k.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (nrm - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("ket {i} has norm {nrm}")));
            }
            let a = Array3::from_shape_vec((1, d, 1), k.clone()).expect("shape");
            sites.push(SiteTensor::from_array(a)?);
        }
        let n = sites.len();
        Ok(MpsState {
            sites,
            bonds: vec![vec![1.0]; n - 1],
            center: Some(0),
            chi_max: 1,
            d,
        })
    }

    /// Random tensors of bond dimension up to `chi` (not normalized).
    pub fn random(n: usize, d: usize, chi: usize, seed: u64) -> Result<Self> {
        if n == 0 || d == 0 || chi == 0 {
            return Err(Error::invalid("n, d and chi must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims: Vec<usize> = (0..=n).map(|b| max_bond(d, b.min(n - b), chi)).collect();
        let sites = (0..n)
            .map(|i| {
                let a = Array3::from_shape_fn((dims[i], d, dims[i + 1]), |_| {
                    C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                SiteTensor::from_array_unchecked(a)
            })
            .collect();
        MpsState::from_sites(sites, chi)
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn chi_max(&self) -> usize {
        self.chi_max
    }

    pub fn with_chi_max(mut self, chi: usize) -> Result<Self> {
        if chi == 0 {
            return Err(Error::invalid("chi_max must be at least 1"));
        }
        self.chi_max = chi;
        Ok(self)
    }

    pub fn sites(&self) -> &[SiteTensor] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &SiteTensor {
        &self.sites[i]
    }

    pub fn orthogonality_center(&self) -> Option<usize> {
        self.center
    }

    /// Schmidt values across the bond between sites `b` and `b + 1`, if known.
    pub fn bond_singular_values(&self, b: usize) -> Option<&[f64]> {
        self.bonds.get(b).filter(|v| !v.is_empty()).map(|v| v.as_slice())
    }

    /// Right bond dimension of every site except the last.
    pub fn bond_dims(&self) -> Vec<usize> {
        self.sites[..self.len() - 1]
            .iter()
            .map(|s| s.right_bond())
            .collect()
    }

    pub fn max_bond_dim(&self) -> usize {
        self.bond_dims().into_iter().max().unwrap_or(1)
    }

    /// Check the invariants of a canonical state.
    pub fn check_canonical(&self) -> Result<()> {
        let c = self
            .center
            .ok_or_else(|| Error::InvalidState("no orthogonality centre".into()))?;
        for (i, s) in self.sites.iter().enumerate() {
            let defect = match i.cmp(&c) {
                std::cmp::Ordering::Less => s.left_orthonormality_defect(),
                std::cmp::Ordering::Greater => s.right_orthonormality_defect(),
                std::cmp::Ordering::Equal => {
                    let n2: f64 = s.array().iter().map(|z| z.norm_sqr()).sum();
                    (n2 - 1.0).abs()
                }
            };
            if defect > NORM_TOL {
                return Err(Error::InvalidState(format!(
                    "site {i} violates the canonical form by {defect:e}"
                )));
            }
        }
        for (b, sv) in self.bonds.iter().enumerate() {
            if sv.is_empty() {
                return Err(Error::InvalidState(format!("bond {b} has no Schmidt values")));
            }
            let sum: f64 = sv.iter().map(|s| s * s).sum();
            let sorted = sv.windows(2).all(|w| w[0] >= w[1]);
            if (sum - 1.0).abs() > NORM_TOL || !sorted || sv.iter().any(|s| *s <= 0.0) {
                return Err(Error::InvalidState(format!("bond {b} Schmidt values invalid")));
            }
        }
        Ok(())
    }

    /// Normalize, truncate to `chi_max` and move the orthogonality centre to
    /// `center`, recording the Schmidt values of every bond.
    pub fn canonicalize(&self, center: usize) -> Result<MpsState> {
        let n = self.len();
        if center >= n {
            return Err(Error::invalid(format!("centre {center} outside chain of {n}")));
        }
        let d = self.d;
        let degenerate = |e: Error| match e {
            Error::DegenerateTruncation => Error::DegenerateState("all weight truncated".into()),
            e => e,
        };
        let mut sites: Vec<Array3<C64>> = self.sites.iter().map(|s| s.array().clone()).collect();

        // left sweep: left-orthonormalize everything
        for i in 0..n - 1 {
            let (l, _, r) = sites[i].dim();
            let m = sites[i].view().into_shape_with_order((l * d, r)).expect("std");
            let (u, s, vt, _) = svd_arrays(m, usize::MAX, 0.0).map_err(degenerate)?;
            let k = s.len();
            sites[i] = into_site(u, (l, d, k));
            let sv = scale_rows(vt, &s);
            sites[i + 1] = absorb_left(&sv, &sites[i + 1]);
        }
        let last = &mut sites[n - 1];
        let nrm: f64 = last.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::DegenerateState("state has zero norm".into()));
        }
        last.mapv_inplace(|z| z / nrm);

        // right sweep: Schmidt values and truncation
        let mut bonds = vec![Vec::new(); n - 1];
        for i in (1..n).rev() {
            let (l, _, r) = sites[i].dim();
            let m = sites[i].view().into_shape_with_order((l, d * r)).expect("std");
            let (u, mut s, vt, _) =
                svd_arrays(m, self.chi_max, SCHMIDT_CUTOFF).map_err(degenerate)?;
            let total: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
            s.iter_mut().for_each(|x| *x /= total);
            let k = s.len();
            sites[i] = into_site(vt, (k, d, r));
            let us = scale_cols(u, &s);
            sites[i - 1] = absorb_right(&sites[i - 1], &us);
            bonds[i - 1] = s;
        }
        let first = &mut sites[0];
        let nrm: f64 = first.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        first.mapv_inplace(|z| z / nrm);

        // gauge the centre into place
        for i in 0..center {
            let (l, _, r) = sites[i].dim();
            let m = sites[i].view().into_shape_with_order((l * d, r)).expect("std");
            let (u, s, vt, _) = svd_arrays(m, usize::MAX, 0.0).map_err(degenerate)?;
            let k = s.len();
            sites[i] = into_site(u, (l, d, k));
            let sv = scale_rows(vt, &s);
            sites[i + 1] = absorb_left(&sv, &sites[i + 1]);
        }

        Ok(MpsState {
            sites: sites.into_iter().map(SiteTensor::from_array_unchecked).collect(),
            bonds,
            center: Some(center),
            chi_max: self.chi_max,
            d,
        })
    }

    /// Entropy in bits of the Schmidt spectrum of the central bond.
    pub fn half_chain_entropy(&self) -> Result<f64> {
        let n = self.len();
        if n % 2 != 0 {
            return Err(Error::invalid("half-chain entropy needs an even chain"));
        }
        let sv = self
            .bond_singular_values(n / 2 - 1)
            .ok_or_else(|| Error::InvalidState("central bond not canonicalized".into()))?;
        Ok(schmidt_entropy(sv))
    }

    /// Contract every physical index with `U†`, so measurement outcome `r`
    /// becomes computational state `r`.
    pub fn apply_local_basis(&self, basis: &MeasurementBasis) -> Result<MpsState> {
        if basis.dim() != self.d {
            return Err(Error::invalid(format!(
                "basis dimension {} does not match local dimension {}",
                basis.dim(),
                self.d
            )));
        }
        let u = basis.unitary().as_array();
        // A'[a, r, b] = Σ_s conj(U[s, r]) A[a, s, b]
        let ud = u.t().mapv(|z| z.conj());
        let sites = self
            .sites
            .iter()
            .map(|s| {
                let (l, d, r) = s.array().dim();
                let mut out = Array3::zeros((l, d, r));
                for a in 0..l {
                    let block = s.array().index_axis(ndarray::Axis(0), a);
                    out.index_axis_mut(ndarray::Axis(0), a).assign(&ud.dot(&block));
                }
                SiteTensor::from_array_unchecked(out)
            })
            .collect();
        Ok(MpsState {
            sites,
            bonds: self.bonds.clone(),
            center: self.center,
            chi_max: self.chi_max,
            d: self.d,
        })
    }

    /// Probabilities of computational-basis words on `win`, all other sites
    /// traced out.
    pub fn word_distribution(&self, win: Window) -> Result<WordDistribution> {
        self.word_distribution_with(win, Exec::default())
    }

    pub fn word_distribution_with(&self, win: Window, exec: Exec) -> Result<WordDistribution> {
        if !win.fits(self.len()) {
            return Err(Error::invalid(format!(
                "window {}..{} exceeds chain of {}",
                win.start(),
                win.end(),
                self.len()
            )));
        }
        let d = self.d;
        let w = win.len();
        let size = (d as u64)
            .checked_pow(w as u32)
            .filter(|&s| s <= MAX_WORDS)
            .ok_or_else(|| Error::Capacity(format!("{d}^{w} words exceed the table limit")))?
            as usize;
        match self.center {
            Some(c) if win.contains(c) => {}
            _ => {
                return Err(Error::InvalidState(
                    "orthogonality centre must lie inside the window".into(),
                ))
            }
        }
        let tensors = &self.sites[win.start()..win.end()];
        let mut probs = vec![0.0; size];
        let chunk = size / d;
        exec.for_each_chunk(&mut probs, chunk, |r, out| {
            let m = tensors[0].slice(r).to_owned();
            branch(&tensors[1..], m, 0, d, out);
        });
        let mut wd = WordDistribution::from_weights(d, w, probs)?;
        wd.set_meta("window_start", win.start().to_string());
        wd.set_meta("window_length", w.to_string());
        Ok(wd)
    }

    /// Real part of `⟨ψ|H|ψ⟩` (no normalization applied).
    pub fn expectation(&self, h: &MpoOperator) -> Result<f64> {
        Ok(self.expectation_complex(h)?.re)
    }

    pub fn expectation_complex(&self, h: &MpoOperator) -> Result<C64> {
        if h.len() != self.len() || h.local_dim() != self.d {
            return Err(Error::invalid("operator and state shapes differ"));
        }
        let mut env = trivial_env();
        for (s, w) in self.sites.iter().zip(h.sites()) {
            env = extend_left(&env, s.array(), w);
        }
        Ok(env[[0, 0, 0]])
    }

    /// `⟨self|other⟩`
    pub fn overlap(&self, other: &MpsState) -> Result<C64> {
        if self.len() != other.len() || self.d != other.d {
            return Err(Error::invalid("states have different shapes"));
        }
        let mut e = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
        for (a, b) in self.sites.iter().zip(&other.sites) {
            // e'[α, β] = Σ_s A^s† e B^s
            let (_, _, ra) = a.array().dim();
            let (_, _, rb) = b.array().dim();
            let mut next = Array2::zeros((ra, rb));
            for s in 0..self.d {
                let eb = e.dot(&b.slice(s));
                next = next + a.slice(s).t().mapv(|z| z.conj()).dot(&eb);
            }
            e = next;
        }
        Ok(e[[0, 0]])
    }

    pub fn norm_squared(&self) -> f64 {
        self.overlap(self).map(|z| z.re).unwrap_or(0.0)
    }

    /// Full amplitude vector, site 0 most significant.
    pub fn to_dense(&self) -> Result<Vec<C64>> {
        let dim = (self.d as u64)
            .checked_pow(self.len() as u32)
            .filter(|&x| x <= MAX_DENSE)
            .ok_or_else(|| Error::Capacity("state too large for a dense vector".into()))?;
        let mut v = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
        for s in &self.sites {
            let (l, d, r) = s.array().dim();
            let m = s.array().view().into_shape_with_order((l, d * r)).expect("std");
            let rows = v.nrows();
            v = v.dot(&m).into_shape_with_order((rows * d, r)).expect("size");
        }
        debug_assert_eq!(v.len() as u64, dim);
        Ok(v.into_iter().collect())
    }
}

/// Entropy in bits of `{λ²}`.
pub fn schmidt_entropy(sv: &[f64]) -> f64 {
    crate::compmech::entropy_bits(sv.iter().map(|s| s * s))
}

fn max_bond(d: usize, sites: usize, chi: usize) -> usize {
    let mut dim = 1usize;
    for _ in 0..sites {
        dim = dim.saturating_mul(d);
        if dim >= chi {
            return chi;
        }
    }
    dim
}

fn branch(rest: &[SiteTensor], m: Array2<C64>, word: usize, d: usize, out: &mut [f64]) {
    let weight: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if rest.is_empty() {
        out[word] = weight;
        return;
    }
    if weight < 1e-30 {
        return;
    }
    for r in 0..d {
        let next = m.dot(&rest[0].slice(r));
        branch(&rest[1..], next, word * d + r, d, out);
    }
}

fn into_site(m: Array2<C64>, shape: (usize, usize, usize)) -> Array3<C64> {
    m.as_standard_layout()
        .into_owned()
        .into_shape_with_order(shape)
        .expect("size")
}

fn scale_rows(mut m: Array2<C64>, s: &[f64]) -> Array2<C64> {
    for (mut row, &x) in m.rows_mut().into_iter().zip(s) {
        row.mapv_inplace(|z| z * x);
    }
    m
}

fn scale_cols(mut m: Array2<C64>, s: &[f64]) -> Array2<C64> {
    for (mut col, &x) in m.columns_mut().into_iter().zip(s) {
        col.mapv_inplace(|z| z * x);
    }
    m
}

/// `(m · A)` on the left bond.
fn absorb_left(m: &Array2<C64>, a: &Array3<C64>) -> Array3<C64> {
    let (l, d, r) = a.dim();
    let am = a.view().into_shape_with_order((l, d * r)).expect("std");
    into_site(m.dot(&am), (m.nrows(), d, r))
}

/// `(A · m)` on the right bond.
fn absorb_right(a: &Array3<C64>, m: &Array2<C64>) -> Array3<C64> {
    let (l, d, r) = a.dim();
    let am = a.view().into_shape_with_order((l * d, r)).expect("std");
    into_site(am.dot(m), (l, d, m.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ising_mpo, sigma_theta_basis, IsingParams, SpinConvention};
    use crate::tensor::{c, inner};

    fn up() -> Vec<C64> {
        vec![c(1.0), c(0.0)]
    }
    fn down() -> Vec<C64> {
        vec![c(0.0), c(1.0)]
    }
    fn plus() -> Vec<C64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![c(h), c(h)]
    }

    #[test]
    fn product_state_is_unentangled() {
        let s = MpsState::product_state(&vec![down(); 4]).unwrap();
        assert_eq!(s.half_chain_entropy().unwrap(), 0.0);
        s.check_canonical().unwrap();
        assert!(MpsState::product_state(&[vec![c(1.0), c(1.0)]]).is_err());
    }

    #[test]
    fn mixed_kets_have_unit_norm() {
        let s = MpsState::product_state(&[up(), plus(), down(), plus()]).unwrap();
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_has_one_bit() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = Array3::from_shape_vec((1, 2, 2), vec![c(h), c(0.0), c(0.0), c(-h)]).unwrap();
        let b = Array3::from_shape_vec((2, 2, 1), vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        let s = MpsState::from_sites(
            vec![SiteTensor::from_array(a).unwrap(), SiteTensor::from_array(b).unwrap()],
            4,
        )
        .unwrap()
        .canonicalize(0)
        .unwrap();
        assert!((s.half_chain_entropy().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn canonicalize_preserves_the_state() {
        let raw = MpsState::random(8, 2, 4, 3).unwrap();
        let nrm = raw.norm_squared().sqrt();
        for center in [0, 3, 7] {
            let s = raw.canonicalize(center).unwrap();
            s.check_canonical().unwrap();
            let ov = raw.overlap(&s).unwrap().norm() / nrm;
            assert!(ov >= 1.0 - 1e-10, "overlap {ov}");
            let again = s.canonicalize(center).unwrap();
            let diff = s
                .to_dense()
                .unwrap()
                .iter()
                .zip(again.to_dense().unwrap())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
            assert!(diff < 1e-12, "not idempotent: {diff}");
        }
    }

    #[test]
    fn canonicalize_rejects_zero_state() {
        let mut raw = MpsState::random(4, 2, 2, 1).unwrap();
        raw.sites[2] = SiteTensor::from_array_unchecked(Array3::zeros(raw.sites[2].array().dim()));
        assert!(matches!(raw.canonicalize(0), Err(Error::DegenerateState(_))));
    }

    #[test]
    fn basis_rotation_matches_dense_amplitudes() {
        let s = MpsState::random(5, 2, 3, 9).unwrap().canonicalize(2).unwrap();
        let basis = sigma_theta_basis(0.7).unwrap();
        let rotated = s.apply_local_basis(&basis).unwrap();
        assert!((rotated.norm_squared() - 1.0).abs() < 1e-12);
        let psi = s.to_dense().unwrap();
        let out = rotated.to_dense().unwrap();
        // amplitude of word r equals ⊗⟨r_j|ψ⟩
        for (idx, amp) in out.iter().enumerate() {
            let mut ket = vec![c(1.0)];
            for j in 0..5 {
                let r = (idx >> (4 - j)) & 1;
                let k = basis.ket(r);
                ket = ket.iter().flat_map(|a| k.iter().map(move |b| a * b)).collect();
            }
            assert!((inner(&ket, &psi) - amp).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_round_trip_is_identity() {
        let s = MpsState::random(4, 2, 2, 5).unwrap().canonicalize(0).unwrap();
        let basis = sigma_theta_basis(1.1).unwrap();
        let inv = MeasurementBasis::new(basis.unitary().adjoint(), "inv").unwrap();
        let back = s.apply_local_basis(&basis).unwrap().apply_local_basis(&inv).unwrap();
        let a = s.to_dense().unwrap();
        let b = back.to_dense().unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).norm() < 1e-12));
        let id = MeasurementBasis::new(crate::models::ops::identity(2), "id").unwrap();
        let same = s.apply_local_basis(&id).unwrap().to_dense().unwrap();
        assert!(a.iter().zip(&same).all(|(x, y)| (x - y).norm() < 1e-15));
    }

    #[test]
    fn product_words() {
        let s = MpsState::product_state(&vec![down(); 6]).unwrap();
        let z = s.apply_local_basis(&sigma_theta_basis(0.0).unwrap()).unwrap();
        let wd = z.word_distribution(Window::new(0, 3).unwrap()).unwrap();
        assert_eq!(wd.prob_of(&[1, 1, 1]), 1.0);
        let x = s
            .apply_local_basis(&sigma_theta_basis(std::f64::consts::FRAC_PI_2).unwrap())
            .unwrap();
        let wd = x.word_distribution(Window::new(0, 2).unwrap()).unwrap();
        assert!(wd.probs().iter().all(|p| (p - 0.25).abs() < 1e-15));
        let p = MpsState::product_state(&vec![plus(); 4]).unwrap();
        let wd = p
            .apply_local_basis(&sigma_theta_basis(std::f64::consts::FRAC_PI_2).unwrap())
            .unwrap()
            .word_distribution(Window::new(0, 4).unwrap())
            .unwrap();
        assert!((wd.prob(0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn words_need_centre_in_window() {
        let s = MpsState::random(6, 2, 2, 2).unwrap().canonicalize(0).unwrap();
        assert!(matches!(
            s.word_distribution(Window::new(2, 3).unwrap()),
            Err(Error::InvalidState(_))
        ));
        assert!(s.word_distribution(Window::new(4, 3).unwrap()).is_err());
    }

    #[test]
    fn words_marginalize_consistently() {
        let s = MpsState::random(8, 2, 4, 11).unwrap().canonicalize(3).unwrap();
        let long = s.word_distribution(Window::new(2, 4).unwrap()).unwrap();
        let short = s.word_distribution(Window::new(2, 3).unwrap()).unwrap();
        let tv = long.marginal_prefix(3).unwrap().total_variation(&short).unwrap();
        assert!(tv < 1e-10);
        let seq = s
            .word_distribution_with(Window::new(2, 4).unwrap(), Exec::Sequential)
            .unwrap();
        assert_eq!(seq.probs(), long.probs());
    }

    #[test]
    fn field_aligned_energy() {
        let p = IsingParams::new(1.0, 1.0, 2)
            .unwrap()
            .with_symmetry_break(0.0)
            .unwrap()
            .with_convention(SpinConvention::Pauli);
        let h = ising_mpo(&p).unwrap();
        let s = MpsState::product_state(&[up(), up()]).unwrap();
        assert!((s.expectation(&h).unwrap() + 2.0).abs() < 1e-14);
    }

    #[test]
    fn energy_is_gauge_invariant() {
        let p = IsingParams::new(1.0, 0.7, 6).unwrap();
        let h = ising_mpo(&p).unwrap();
        let s = MpsState::random(6, 2, 4, 4).unwrap().canonicalize(5).unwrap();
        let e = s.expectation(&h).unwrap();
        let e2 = s.canonicalize(1).unwrap().expectation(&h).unwrap();
        assert!((e - e2).abs() < 1e-12);
        assert!(s.expectation_complex(&h).unwrap().im.abs() < 1e-10);
    }

    #[test]
    fn centered_window() {
        let w = Window::centered(10, 4).unwrap();
        assert_eq!((w.start(), w.end()), (3, 7));
        assert!(Window::centered(3, 4).is_err());
    }
}
