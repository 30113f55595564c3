//! Environment and effective-Hamiltonian contractions shared by `mps` and
//! `dmrg`. Every contraction is a permutation followed by one matrix product.
//!
//! Index conventions:
//! - site tensor `A[left, phys, right]`
//! - MPO tensor `W[left, out, in, right]`
//! - left environment `L[bra, mpo, ket]`, right environment `R[bra, mpo, ket]`

use ndarray::{Array2, Array3, Array4, ArrayD, IxDyn};

use crate::tensor::C64;

fn permuted(a: ArrayD<C64>, axes: &[usize]) -> ArrayD<C64> {
    a.permuted_axes(IxDyn(axes)).as_standard_layout().into_owned()
}

fn as_matrix(a: ArrayD<C64>, rows: usize) -> Array2<C64> {
    let cols = a.len() / rows;
    a.into_shape_with_order((rows, cols)).expect("standard layout")
}

fn reshape(a: Array2<C64>, shape: &[usize]) -> ArrayD<C64> {
    a.into_dyn()
        .into_shape_with_order(IxDyn(shape))
        .expect("size preserved")
}

fn conj3(a: &Array3<C64>) -> Array3<C64> {
    a.mapv(|z| z.conj())
}

/// Boundary environment of bond dimension 1.
pub(crate) fn trivial_env() -> Array3<C64> {
    Array3::from_elem((1, 1, 1), C64::new(1.0, 0.0))
}

/// Absorb site `a` (and its MPO tensor) into a left environment.
pub(crate) fn extend_left(env: &Array3<C64>, a: &Array3<C64>, w: &Array4<C64>) -> Array3<C64> {
    let (ea, ew, ek) = env.dim();
    let (al, d, ar) = a.dim();
    let (_, _, _, wr) = w.dim();
    debug_assert_eq!(ek, al);
    // T1[a, w, t, b'] = Σ L[a, w, a'] A[a', t, b']
    let l = env.view().into_shape_with_order((ea * ew, ek)).expect("std");
    let am = a.view().into_shape_with_order((al, d * ar)).expect("std");
    let t1 = reshape(l.dot(&am), &[ea, ew, d, ar]);
    // T2[a, b', s, w'] = Σ_{w,t} T1[a, w, t, b'] W[w, s, t, w']
    let t1 = as_matrix(permuted(t1, &[0, 3, 1, 2]), ea * ar);
    let wp = as_matrix(permuted(w.clone().into_dyn(), &[0, 2, 1, 3]), ew * d);
    let t2 = reshape(t1.dot(&wp), &[ea, ar, d, wr]);
    // E'[b, w', b'] = Σ_{a,s} conj(A[a, s, b]) T2[a, b', s, w']
    let ac = conj3(a);
    let ac = ac.view().into_shape_with_order((al * d, ar)).expect("std");
    let t2 = as_matrix(permuted(t2, &[0, 2, 3, 1]), ea * d);
    let out = ac.t().dot(&t2);
    out.into_shape_with_order((ar, wr, ar)).expect("size")
}

/// Absorb site `b` (and its MPO tensor) into a right environment.
pub(crate) fn extend_right(env: &Array3<C64>, b: &Array3<C64>, w: &Array4<C64>) -> Array3<C64> {
    let (eb, ew, ek) = env.dim();
    let (bl, d, br) = b.dim();
    let (wl, _, _, _) = w.dim();
    debug_assert_eq!(ek, br);
    // T1[a', t, b, w'] = Σ_{b'} B[a', t, b'] R[b, w', b']
    let bm = b.view().into_shape_with_order((bl * d, br)).expect("std");
    let r = env.view().into_shape_with_order((eb * ew, ek)).expect("std");
    let t1 = reshape(bm.dot(&r.t()), &[bl, d, eb, ew]);
    // T2[a', b, w, s] = Σ_{t,w'} T1[a', t, b, w'] W[w, s, t, w']
    let t1 = as_matrix(permuted(t1, &[0, 2, 1, 3]), bl * eb);
    let wp = as_matrix(permuted(w.clone().into_dyn(), &[2, 3, 0, 1]), d * ew);
    let t2 = reshape(t1.dot(&wp), &[bl, eb, wl, d]);
    // R'[a, w, a'] = Σ_{s,b} conj(B[a, s, b]) T2[a', b, w, s]
    let bc = conj3(b);
    let bc = bc.view().into_shape_with_order((bl, d * br)).expect("std");
    let t2 = as_matrix(permuted(t2, &[3, 1, 2, 0]), d * eb);
    let out = bc.dot(&t2);
    out.into_shape_with_order((bl, wl, bl)).expect("size")
}

/// Two-site effective Hamiltonian `L · W1 · W2 · R`, with the operands
/// pre-permuted for repeated application.
pub(crate) struct TwoSiteOperator {
    l: Array2<C64>,
    w1: Array2<C64>,
    w2: Array2<C64>,
    r: Array2<C64>,
    dl: usize,
    wl: usize,
    d1: usize,
    d2: usize,
    wm: usize,
    wr: usize,
    dr: usize,
}

impl TwoSiteOperator {
    pub(crate) fn new(
        left: &Array3<C64>,
        w1: &Array4<C64>,
        w2: &Array4<C64>,
        right: &Array3<C64>,
    ) -> Self {
        let (dl, wl, _) = left.dim();
        let (_, d1, _, wm) = w1.dim();
        let (_, d2, _, wr) = w2.dim();
        let (dr, _, _) = right.dim();
        let l = left
            .clone()
            .into_shape_with_order((dl * wl, dl))
            .expect("std");
        let w1p = as_matrix(permuted(w1.clone().into_dyn(), &[0, 2, 1, 3]), wl * d1);
        let w2p = as_matrix(permuted(w2.clone().into_dyn(), &[0, 2, 1, 3]), wm * d2);
        // R[b, wr, b'] -> [wr, b', b]
        let rp = as_matrix(permuted(right.clone().into_dyn(), &[1, 2, 0]), wr * dr);
        TwoSiteOperator {
            l,
            w1: w1p,
            w2: w2p,
            r: rp,
            dl,
            wl,
            d1,
            d2,
            wm,
            wr,
            dr,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dl * self.d1 * self.d2 * self.dr
    }

    pub(crate) fn shape(&self) -> (usize, usize, usize, usize) {
        (self.dl, self.d1, self.d2, self.dr)
    }

    /// `out = H_eff · theta` with `theta[a', s1', s2', b']` flattened.
    pub(crate) fn apply(&self, theta: &[C64], out: &mut [C64]) {
        let (dl, wl, d1, d2, wm, wr, dr) =
            (self.dl, self.wl, self.d1, self.d2, self.wm, self.wr, self.dr);
        let th = ndarray::ArrayView2::from_shape((dl, d1 * d2 * dr), theta).expect("dim");
        // [a, w, s1', s2', b']
        let t1 = reshape(self.l.dot(&th), &[dl, wl, d1, d2, dr]);
        // [a, s2', b', w, s1'] x [w, s1'; s1, wm] -> [a, s2', b', s1, wm]
        let t1 = as_matrix(permuted(t1, &[0, 3, 4, 1, 2]), dl * d2 * dr);
        let t2 = reshape(t1.dot(&self.w1), &[dl, d2, dr, d1, wm]);
        // [a, b', s1, wm, s2'] x [wm, s2'; s2, wr] -> [a, b', s1, s2, wr]
        let t2 = as_matrix(permuted(t2, &[0, 2, 3, 4, 1]), dl * dr * d1);
        let t3 = reshape(t2.dot(&self.w2), &[dl, dr, d1, d2, wr]);
        // [a, s1, s2, wr, b'] x [wr, b'; b] -> [a, s1, s2, b]
        let t3 = as_matrix(permuted(t3, &[0, 2, 3, 4, 1]), dl * d1 * d2);
        let res = t3.dot(&self.r);
        out.copy_from_slice(res.as_slice().expect("fresh array is contiguous"));
    }
}

/// Contract two neighbouring site tensors into `θ[a, s1, s2, b]`.
pub(crate) fn merge_sites(a: &Array3<C64>, b: &Array3<C64>) -> Array4<C64> {
    let (al, d1, ar) = a.dim();
    let (_, d2, br) = b.dim();
    let am = a.view().into_shape_with_order((al * d1, ar)).expect("std");
    let bm = b.view().into_shape_with_order((ar, d2 * br)).expect("std");
    am.dot(&bm)
        .into_shape_with_order((al, d1, d2, br))
        .expect("size")
}
