//! Lattice Hamiltonians as matrix-product operators, and site-local
//! measurement bases.
//!
//! Spin conventions: `σz = diag(1, −1)`, so basis state 0 is `|↑⟩` (σz = +1)
//! and basis state 1 is `|↓⟩`. The transverse-field term `−B σz` therefore
//! aligns spins with state 0.

use ndarray::Array4;
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, C64};

/// Operators acting on a single site.
pub mod ops {
    use crate::tensor::{ComplexMatrix, C64};

    pub fn identity(d: usize) -> ComplexMatrix {
        ComplexMatrix::identity(d)
    }

    pub fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("finite")
    }

    pub fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("finite")
    }

    /// `σ_θ = cos θ σz + sin θ σx`.
    pub fn sigma_theta(theta: f64) -> ComplexMatrix {
        let (s, c) = theta.sin_cos();
        ComplexMatrix::from_real(2, 2, &[c, s, s, -c]).expect("finite")
    }

    /// Truncated bosonic annihilation operator: `b|n⟩ = √n |n−1⟩`.
    pub fn annihilation(n_max: usize) -> ComplexMatrix {
        let d = n_max + 1;
        ComplexMatrix::from_fn(d, d, |(i, j)| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// Truncated creation operator; `b†|n_max⟩ = 0`.
    pub fn creation(n_max: usize) -> ComplexMatrix {
        annihilation(n_max).adjoint()
    }

    pub fn number(n_max: usize) -> ComplexMatrix {
        let occ: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
        ComplexMatrix::diag_real(&occ)
    }
}

/// Normalization of the spin operators in the Ising Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpinConvention {
    /// Pauli matrices (eigenvalues ±1). Critical point at B/J = 1.
    Pauli,
    /// Spin-½ operators `S = σ/2`. Critical point at B/J = 1/2.
    #[default]
    SpinHalf,
}

impl SpinConvention {
    pub fn name(&self) -> &'static str {
        match self {
            SpinConvention::Pauli => "pauli",
            SpinConvention::SpinHalf => "spin-half",
        }
    }
}

/// Transverse-field Ising chain `Σ −J s^x s^x − B s^z` with `s` either the
/// Pauli matrices or `σ/2`, plus `−h Σ σx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParams {
    pub j: f64,
    pub b: f64,
    pub n: usize,
    /// Longitudinal field along +x that selects one of the two ordered states.
    pub symmetry_break_h: f64,
    pub convention: SpinConvention,
}

impl IsingParams {
    /// Parameters with the default symmetry-breaking field `1e-8·J`.
    pub fn new(j: f64, b: f64, n: usize) -> Result<Self> {
        let p = IsingParams {
            j,
            b,
            n,
            symmetry_break_h: 1e-8 * j,
            convention: SpinConvention::default(),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_convention(mut self, c: SpinConvention) -> Self {
        self.convention = c;
        self
    }

    /// Coefficients `(a, b)` of `−a σxσx − b σz` in Pauli form.
    pub fn pauli_couplings(&self) -> (f64, f64) {
        match self.convention {
            SpinConvention::Pauli => (self.j, self.b),
            SpinConvention::SpinHalf => (0.25 * self.j, 0.5 * self.b),
        }
    }

    pub fn with_symmetry_break(mut self, h: f64) -> Result<Self> {
        self.symmetry_break_h = h;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("Ising chain needs N >= 2"));
        }
        if !(self.j >= 0.0) || !self.j.is_finite() {
            return Err(Error::invalid("Ising coupling J must be finite and >= 0"));
        }
        if !(self.b >= 0.0) || !self.b.is_finite() {
            return Err(Error::invalid("Ising field B must be finite and >= 0"));
        }
        if !(self.symmetry_break_h >= 0.0) || !self.symmetry_break_h.is_finite() {
            return Err(Error::invalid("symmetry_break_h must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Bose-Hubbard chain with a quadratic penalty pinning the particle number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoseHubbardParams {
    pub j: f64,
    pub u: f64,
    pub n: usize,
    pub n_max: usize,
    /// Filling factor, bosons per site.
    pub nu: f64,
    /// Energy per squared deviation of the total particle number from `ν·N`.
    pub penalty_weight: f64,
}

impl BoseHubbardParams {
    /// Parameters with the default penalty weight `10·max(J, U)`.
    pub fn new(j: f64, u: f64, n: usize, n_max: usize, nu: f64) -> Result<Self> {
        let scale = j.max(u);
        let p = BoseHubbardParams {
            j,
            u,
            n,
            n_max,
            nu,
            penalty_weight: if scale > 0.0 { 10.0 * scale } else { 1.0 },
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_penalty(mut self, w: f64) -> Result<Self> {
        self.penalty_weight = w;
        self.validate()?;
        Ok(self)
    }

    pub fn local_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn target_particles(&self) -> f64 {
        self.nu * self.n as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid("Bose-Hubbard chain needs N >= 2"));
        }
        if !(self.j >= 0.0) || !(self.u >= 0.0) || !self.j.is_finite() || !self.u.is_finite() {
            return Err(Error::invalid("J and U must be finite and >= 0"));
        }
        if self.n_max < 1 {
            return Err(Error::invalid("n_max must be at least 1"));
        }
        let total = self.nu * self.n as f64;
        if !(self.nu >= 0.0) || (total - total.round()).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "filling nu*N = {total} is not an integer"
            )));
        }
        if !(self.penalty_weight > 0.0) || !self.penalty_weight.is_finite() {
            return Err(Error::invalid("penalty_weight must be positive"));
        }
        Ok(())
    }
}

/// Either supported lattice model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    Ising(IsingParams),
    BoseHubbard(BoseHubbardParams),
}

impl ModelParams {
    pub fn n(&self) -> usize {
        match self {
            ModelParams::Ising(p) => p.n,
            ModelParams::BoseHubbard(p) => p.n,
        }
    }

    pub fn local_dim(&self) -> usize {
        match self {
            ModelParams::Ising(_) => 2,
            ModelParams::BoseHubbard(p) => p.local_dim(),
        }
    }

    pub fn mpo(&self) -> Result<MpoOperator> {
        match self {
            ModelParams::Ising(p) => ising_mpo(p),
            ModelParams::BoseHubbard(p) => bose_hubbard_mpo(p),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelParams::Ising(_) => "ising",
            ModelParams::BoseHubbard(_) => "bosehubbard",
        }
    }
}

/// Matrix-product operator; site tensors are `W[left, out, in, right]`.
#[derive(Debug, Clone)]
pub struct MpoOperator {
    sites: Vec<Array4<C64>>,
    d: usize,
}

impl MpoOperator {
    pub fn new(sites: Vec<Array4<C64>>) -> Result<Self> {
        let first = sites.first().ok_or_else(|| Error::invalid("empty MPO"))?;
        let d = first.dim().1;
        if first.dim().0 != 1 || sites.last().expect("non-empty").dim().3 != 1 {
            return Err(Error::invalid("MPO boundary bonds must have dimension 1"));
        }
        for (i, w) in sites.iter().enumerate() {
            let (_, o, inp, r) = w.dim();
            if o != d || inp != d {
                return Err(Error::invalid(format!("MPO site {i} has wrong local dimension")));
            }
            if let Some(next) = sites.get(i + 1) {
                if next.dim().0 != r {
                    return Err(Error::invalid(format!("MPO bond {i} is inconsistent")));
                }
            }
        }
        Ok(MpoOperator { sites, d })
    }

    /// Uniform MPO from a bulk operator-valued matrix. Bond state `start` is
    /// selected at the left boundary and `done` at the right boundary.
    pub(crate) fn from_bulk(
        n: usize,
        d: usize,
        width: usize,
        start: usize,
        done: usize,
        entries: &[(usize, usize, ComplexMatrix)],
    ) -> Self {
        let mut bulk = Array4::<C64>::zeros((width, d, d, width));
        for (a, b, op) in entries {
            for s in 0..d {
                for t in 0..d {
                    bulk[[*a, s, t, *b]] += op.get(s, t);
                }
            }
        }
        let sites = (0..n)
            .map(|i| {
                let mut w = bulk.clone();
                if i == 0 {
                    w = w.slice(ndarray::s![start..start + 1, .., .., ..]).to_owned();
                }
                if i == n - 1 {
                    w = w.slice(ndarray::s![.., .., .., done..done + 1]).to_owned();
                }
                w
            })
            .collect();
        MpoOperator { sites, d }
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

    pub fn site(&self, i: usize) -> &Array4<C64> {
        &self.sites[i]
    }

    pub fn sites(&self) -> &[Array4<C64>] {
        &self.sites
    }

    /// Dimensions of the `N+1` bonds, boundaries included.
    pub fn bond_dims(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.sites.iter().map(|w| w.dim().0).collect();
        v.push(1);
        v
    }

    /// Dense matrix with site 0 as the most significant tensor factor.
    pub fn to_dense(&self) -> Result<ComplexMatrix> {
        let d = self.d;
        let n = self.sites.len();
        let dim = (d as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        if dim > 1 << 12 {
            return Err(Error::Capacity(format!("dense MPO of dimension {dim}")));
        }
        // acc[i, j, a] over the sites contracted so far
        let mut acc = ndarray::Array3::<C64>::from_elem((1, 1, 1), C64::new(1.0, 0.0));
        for w in &self.sites {
            let (wl, _, _, wr) = w.dim();
            let (ri, rj, _) = acc.dim();
            let mut next = ndarray::Array3::<C64>::zeros((ri * d, rj * d, wr));
            for i in 0..ri {
                for j in 0..rj {
                    for a in 0..wl {
                        let v = acc[[i, j, a]];
                        if v == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for s in 0..d {
                            for t in 0..d {
                                for b in 0..wr {
                                    let x = w[[a, s, t, b]];
                                    if x != C64::new(0.0, 0.0) {
                                        next[[i * d + s, j * d + t, b]] += v * x;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            acc = next;
        }
        let (r, c, _) = acc.dim();
        ComplexMatrix::from_array(
            acc.into_shape_with_order((r, c)).expect("final bond has dimension 1"),
        )
    }
}

/// MPO of the transverse-field Ising chain, bond dimension 3.
pub fn ising_mpo(p: &IsingParams) -> Result<MpoOperator> {
    p.validate()?;
    let (x, z) = (ops::pauli_x(), ops::pauli_z());
    let id = ops::identity(2);
    let (jx, bz) = p.pauli_couplings();
    let onsite = z.scale(-bz).add(&x.scale(-p.symmetry_break_h));
    // bond states: 0 = done, 1 = σx placed, 2 = start
    let entries = vec![
        (0, 0, id.clone()),
        (1, 0, x.clone()),
        (2, 0, onsite),
        (2, 1, x.scale(-jx)),
        (2, 2, id),
    ];
    Ok(MpoOperator::from_bulk(p.n, 2, 3, 2, 0, &entries))
}

/// MPO of the Bose-Hubbard chain plus `W·(Σ_l n_l − νN)²`, bond dimension 5.
///
/// The penalty is written as `Σ_l W q_l² + 2W Σ_{l<m} q_l q_m` with
/// `q = n − ν`, which keeps the bulk tensor translation invariant.
pub fn bose_hubbard_mpo(p: &BoseHubbardParams) -> Result<MpoOperator> {
    p.validate()?;
    let d = p.local_dim();
    let b = ops::annihilation(p.n_max);
    let bd = ops::creation(p.n_max);
    let n = ops::number(p.n_max);
    let id = ops::identity(d);
    let q = n.add(&id.scale(-p.nu));
    let interaction = n.matmul(&n.add(&id.scale(-1.0))).scale(0.5 * p.u);
    let onsite = interaction.add(&q.matmul(&q).scale(p.penalty_weight));
    // bond states: 0 = done, 1 = b† placed, 2 = b placed, 3 = q carried, 4 = start
    let entries = vec![
        (0, 0, id.clone()),
        (1, 0, b.clone()),
        (2, 0, bd.clone()),
        (3, 0, q.clone()),
        (3, 3, id.clone()),
        (4, 0, onsite),
        (4, 1, bd.scale(-p.j)),
        (4, 2, b.scale(-p.j)),
        (4, 3, q.scale(2.0 * p.penalty_weight)),
        (4, 4, id),
    ];
    Ok(MpoOperator::from_bulk(p.n, d, 5, 4, 0, &entries))
}

/// Site-local measurement basis; column `r` is the eigenstate for symbol `r`.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    unitary: ComplexMatrix,
    label: String,
}

impl MeasurementBasis {
    pub fn new(unitary: ComplexMatrix, label: impl Into<String>) -> Result<Self> {
        if !unitary.is_square() {
            return Err(Error::invalid("measurement basis must be square"));
        }
        let n = unitary.rows();
        let defect = unitary
            .adjoint()
            .matmul(&unitary)
            .max_abs_diff(&ComplexMatrix::identity(n));
        if defect > 1e-12 {
            return Err(Error::invalid(format!(
                "measurement basis is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(MeasurementBasis {
            unitary,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.unitary.rows()
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.unitary
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Eigenstate `|r⟩` as a column vector.
    pub fn ket(&self, r: usize) -> Vec<C64> {
        (0..self.dim()).map(|i| self.unitary.get(i, r)).collect()
    }
}

/// Eigenbasis of `σ_θ`; symbol 0 is the +1 eigenstate.
pub fn sigma_theta_basis(theta: f64) -> Result<MeasurementBasis> {
    if !(0.0..=FRAC_PI_2 + 1e-12).contains(&theta) {
        return Err(Error::invalid(format!("theta {theta} outside [0, pi/2]")));
    }
    let (s, c) = (0.5 * theta).sin_cos();
    let u = ComplexMatrix::from_real(2, 2, &[c, -s, s, c])?;
    MeasurementBasis::new(u, format!("theta={theta}"))
}

/// Occupation-number basis; symbol `r` is occupation `r`.
pub fn number_basis(n_max: usize) -> Result<MeasurementBasis> {
    if n_max < 1 {
        return Err(Error::invalid("n_max must be at least 1"));
    }
    MeasurementBasis::new(ComplexMatrix::identity(n_max + 1), "number")
}
