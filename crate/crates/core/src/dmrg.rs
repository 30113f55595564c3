//! Two-site DMRG over an MPO with cached environments.
//!
//! The initial state is grown from both chain ends towards the middle, two
//! sites per step (each step solves a chain two sites longer than the last,
//! reusing the renormalized end blocks). Finite sweeps follow until the
//! relative energy change per sweep drops below `energy_tol`.

use ndarray::Array3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contract::{extend_left, extend_right, merge_sites, trivial_env, TwoSiteOperator};
use crate::error::{Error, Result};
use crate::models::MpoOperator;
use crate::mps::MpsState;
use crate::tensor::{lanczos_ground_with, svd_arrays, LanczosConfig, SiteTensor, C64};

/// Sweeps always run at least this many times before convergence is declared.
pub const MIN_SWEEPS: usize = 4;
const WARMUP_TOL: f64 = 1e-6;
/// Operator applications allowed per local solve in a loose sweep.
const LOOSE_MAX_ITER: usize = 40;
/// Seed residual, in units of `lanczos_tol`, below which a sweep left the
/// state unchanged.
const SETTLED_RES: f64 = 10.0;
/// Local solver tolerance per unit of discarded weight.
const TRUNC_TO_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct DmrgConfig {
    pub chi: usize,
    pub max_sweeps: usize,
    /// Relative energy change per sweep.
    pub energy_tol: f64,
    pub lanczos_tol: f64,
    pub lanczos_max_iter: usize,
    pub svd_cutoff: f64,
    pub seed: u64,
}

impl Default for DmrgConfig {
    fn default() -> Self {
        DmrgConfig {
            chi: 32,
            max_sweeps: 30,
            energy_tol: 1e-12,
            lanczos_tol: 1e-12,
            lanczos_max_iter: 2000,
            svd_cutoff: 1e-24,
            seed: 0,
        }
    }
}

impl DmrgConfig {
    pub fn with_chi(chi: usize) -> Self {
        DmrgConfig {
            chi,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.chi < 2 {
            return Err(Error::invalid("chi must be at least 2"));
        }
        if self.max_sweeps == 0 || self.lanczos_max_iter == 0 {
            return Err(Error::invalid("sweep and iteration budgets must be positive"));
        }
        for (name, v) in [
            ("energy_tol", self.energy_tol),
            ("lanczos_tol", self.lanczos_tol),
            ("svd_cutoff", self.svd_cutoff),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DmrgResult {
    /// Canonical with the orthogonality centre on site 0.
    pub ground_state: MpsState,
    /// `⟨ψ|H|ψ⟩` of the returned state.
    pub energy: f64,
    /// Energy at the end of each full sweep.
    pub energy_history: Vec<f64>,
    pub max_truncation_error: f64,
    pub converged: bool,
}

struct Sweeper<'a> {
    h: &'a MpoOperator,
    cfg: &'a DmrgConfig,
    sites: Vec<Array3<C64>>,
    lefts: Vec<Array3<C64>>,
    rights: Vec<Array3<C64>>,
    bonds: Vec<Vec<f64>>,
    max_trunc: f64,
    sweep_trunc: f64,
    seed_res: f64,
}

/// Lowest-energy MPS of `h` within bond dimension `cfg.chi`.
pub fn ground_state(h: &MpoOperator, cfg: &DmrgConfig) -> Result<DmrgResult> {
    cfg.validate()?;
    let n = h.len();
    if n < 4 {
        return Err(Error::invalid("DMRG needs at least 4 sites"));
    }
    let mut max_trunc = 0.0;
    let start = match grow(h, cfg, &mut max_trunc)? {
        Some(s) => s,
        None => MpsState::random(n, h.local_dim(), cfg.chi.min(16), cfg.seed)?
            .with_chi_max(cfg.chi)?
            .canonicalize(0)?,
    };

    let mut sw = Sweeper::new(h, cfg, &start, max_trunc);
    let mut history: Vec<f64> = Vec::new();
    let mut converged = false;
    let mut last_change = f64::INFINITY;
    let mut loose = f64::INFINITY;
    let mut last_res = f64::INFINITY;
    let mut last_trunc = 0.0;
    for sweep in 0..cfg.max_sweeps {
        // local solves finer than the truncation noise are wasted work
        let floor = cfg.lanczos_tol.max(TRUNC_TO_TOL * last_trunc);
        // loose, capped solves while the energy is still moving; never loosened again
        loose = loose.min((1e-2 * last_change).min(1e-6));
        let capped = loose > floor;
        let tol = floor.max(loose);
        let (e, res, trunc) = sw
            .sweep(tol, capped)
            .map_err(|e| e.with_context(&format!("sweep {}", sweep + 1)))?;
        // the state has stopped moving, or only truncation noise is left
        let settled = res <= SETTLED_RES * cfg.lanczos_tol || res > 0.5 * last_res;
        last_res = res;
        last_trunc = trunc;
        if let Some(&prev) = history.last() {
            let change: f64 = (e - prev).abs();
            last_change = change / e.abs().max(f64::MIN_POSITIVE);
            if history.len() + 1 >= MIN_SWEEPS.min(cfg.max_sweeps)
                && change <= cfg.energy_tol.max(trunc) * e.abs()
                && !capped
                && settled
            {
                history.push(e);
                converged = true;
                break;
            }
        }
        history.push(e);
    }

    let max_truncation_error = sw.max_trunc;
    let state = sw.into_state()?.canonicalize(0)?;
    let norm2 = state.norm_squared();
    let energy = state.expectation(h)? / norm2;
    Ok(DmrgResult {
        ground_state: state,
        energy,
        energy_history: history,
        max_truncation_error,
        converged,
    })
}

fn random_vector(dim: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, 0.0))
        .collect()
}

fn solve(
    op: &TwoSiteOperator,
    seed: &[C64],
    cfg: &DmrgConfig,
    tol: f64,
    capped: bool,
) -> Result<(f64, Vec<C64>, f64)> {
    let lc = LanczosConfig {
        max_iter: if capped {
            cfg.lanczos_max_iter.min(LOOSE_MAX_ITER)
        } else {
            cfg.lanczos_max_iter
        },
        tol,
        accept_unconverged: capped,
        ..LanczosConfig::default()
    };
    let out = lanczos_ground_with(|x, y| op.apply(x, y), op.dim(), &lc, seed)?;
    let seed_res = out.seed_residual / out.energy.abs().max(1.0);
    Ok((out.energy, out.state, seed_res))
}

/// Split `θ[a, s1, s2, b]` into `U`, normalized `s`, `V†`.
fn split(
    theta: &[C64],
    shape: (usize, usize, usize, usize),
    cfg: &DmrgConfig,
) -> Result<(Array3<C64>, Vec<f64>, Array3<C64>, f64)> {
    let (l, d1, d2, r) = shape;
    let m = ndarray::ArrayView2::from_shape((l * d1, d2 * r), theta).expect("dims");
    let (u, mut s, vt, err) = svd_arrays(m, cfg.chi, cfg.svd_cutoff)?;
    let total: f64 = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    s.iter_mut().for_each(|x| *x /= total);
    let k = s.len();
    let u = u
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((l, d1, k))
        .expect("size");
    let vt = vt
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((k, d2, r))
        .expect("size");
    Ok((u, s, vt, err))
}

fn scale_right(a: &mut Array3<C64>, s: &[f64]) {
    for (k, &x) in s.iter().enumerate() {
        a.index_axis_mut(ndarray::Axis(2), k).mapv_inplace(|z| z * x);
    }
}

fn scale_left(a: &mut Array3<C64>, s: &[f64]) {
    for (k, &x) in s.iter().enumerate() {
        a.index_axis_mut(ndarray::Axis(0), k).mapv_inplace(|z| z * x);
    }
}

/// Grow the chain from both ends inwards. Returns `None` when the chain
/// cannot be split into two mirrored halves.
fn grow(h: &MpoOperator, cfg: &DmrgConfig, max_trunc: &mut f64) -> Result<Option<MpsState>> {
    let n = h.len();
    if n % 2 != 0 {
        return Ok(None);
    }
    let half = n / 2;
    for k in 0..half {
        if h.site(k).dim().3 != h.site(n - 1 - k).dim().0 {
            return Ok(None);
        }
    }
    let mut left = trivial_env();
    let mut right = trivial_env();
    let mut a_sites: Vec<Array3<C64>> = Vec::with_capacity(half);
    let mut b_sites: Vec<Array3<C64>> = Vec::with_capacity(half);
    for k in 0..half {
        let (i, j) = (k, n - 1 - k);
        let op = TwoSiteOperator::new(&left, h.site(i), h.site(j), &right);
        let seed = random_vector(op.dim(), cfg.seed.wrapping_add(k as u64));
        // only the last step fixes the state that sweeps start from
        let tol = if k + 1 < half {
            cfg.lanczos_tol.max(WARMUP_TOL)
        } else {
            cfg.lanczos_tol
        };
        let (_, theta, _) = solve(&op, &seed, cfg, tol, false)
            .map_err(|e| e.with_context(&format!("warm-up step {}", k + 1)))?;
        let (mut u, s, vt, err) = split(&theta, op.shape(), cfg)?;
        *max_trunc = f64::max(*max_trunc, err);
        if k + 1 < half {
            left = extend_left(&left, &u, h.site(i));
            right = extend_right(&right, &vt, h.site(j));
        } else {
            scale_right(&mut u, &s);
        }
        a_sites.push(u);
        b_sites.push(vt);
    }
    b_sites.reverse();
    let sites: Vec<SiteTensor> = a_sites
        .into_iter()
        .chain(b_sites)
        .map(SiteTensor::from_array_unchecked)
        .collect();
    let s = MpsState::from_sites(sites, cfg.chi)?.canonicalize(0)?;
    Ok(Some(s))
}

impl<'a> Sweeper<'a> {
    /// `start` must be canonical with centre 0.
    fn new(h: &'a MpoOperator, cfg: &'a DmrgConfig, start: &MpsState, max_trunc: f64) -> Self {
        let n = h.len();
        let sites: Vec<Array3<C64>> = start.sites().iter().map(|s| s.array().clone()).collect();
        let mut rights = vec![trivial_env(); n + 1];
        for i in (2..n).rev() {
            rights[i] = extend_right(&rights[i + 1], &sites[i], h.site(i));
        }
        let bonds = (0..n - 1)
            .map(|b| start.bond_singular_values(b).map(|v| v.to_vec()).unwrap_or_default())
            .collect();
        Sweeper {
            h,
            cfg,
            sites,
            lefts: vec![trivial_env(); n + 1],
            rights,
            bonds,
            max_trunc,
            sweep_trunc: 0.0,
            seed_res: 0.0,
        }
    }

    fn optimize(&mut self, i: usize, tol: f64, capped: bool) -> Result<(f64, Array3<C64>, Vec<f64>, Array3<C64>)> {
        let op = TwoSiteOperator::new(
            &self.lefts[i],
            self.h.site(i),
            self.h.site(i + 1),
            &self.rights[i + 2],
        );
        let theta = merge_sites(&self.sites[i], &self.sites[i + 1]);
        let seed = theta.as_slice().expect("fresh array");
        let (e, x, seed_res) = solve(&op, seed, self.cfg, tol, capped)
            .map_err(|e| e.with_context(&format!("bond {i}")))?;
        self.seed_res = self.seed_res.max(seed_res);
        let (u, s, vt, err) = split(&x, op.shape(), self.cfg)?;
        self.max_trunc = self.max_trunc.max(err);
        self.sweep_trunc = self.sweep_trunc.max(err);
        Ok((e, u, s, vt))
    }

    /// One left-to-right and one right-to-left pass; centre ends on site 0.
    /// Returns the final energy, the largest relative residual of the
    /// incoming two-site states and the largest discarded weight.
    fn sweep(&mut self, tol: f64, capped: bool) -> Result<(f64, f64, f64)> {
        let n = self.h.len();
        self.seed_res = 0.0;
        self.sweep_trunc = 0.0;
        let mut energy = 0.0;
        for i in 0..n - 1 {
            let (e, mut u, s, mut vt) = self.optimize(i, tol, capped)?;
            energy = e;
            if i + 2 < n {
                scale_left(&mut vt, &s);
                self.lefts[i + 1] = extend_left(&self.lefts[i], &u, self.h.site(i));
            } else {
                scale_right(&mut u, &s);
                self.rights[n - 1] = extend_right(&self.rights[n], &vt, self.h.site(n - 1));
            }
            self.sites[i] = u;
            self.sites[i + 1] = vt;
            self.bonds[i] = s;
        }
        for i in (0..n.saturating_sub(2)).rev() {
            let (e, mut u, s, vt) = self.optimize(i, tol, capped)?;
            energy = e;
            scale_right(&mut u, &s);
            self.rights[i + 1] = extend_right(&self.rights[i + 2], &vt, self.h.site(i + 1));
            self.sites[i] = u;
            self.sites[i + 1] = vt;
            self.bonds[i] = s;
        }
        Ok((energy, self.seed_res, self.sweep_trunc))
    }

    fn into_state(&self) -> Result<MpsState> {
        let sites = self
            .sites
            .iter()
            .cloned()
            .map(SiteTensor::from_array_unchecked)
            .collect();
        Ok(MpsState::from_canonical_parts(
            sites,
            self.bonds.clone(),
            0,
            self.cfg.chi,
        ))
    }
}
