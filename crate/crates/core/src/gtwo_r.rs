//! The 49×49 rational G2 R-matrix on the 7-dimensional representation and
//! its basic properties.
//!
//! Basis labels run 1…7 with conjugate index ī = 8 − i; the weight of each
//! label in the (α₁, α₂) lattice is recorded in [`WEIGHT`]. The matrix is
//! assembled as Σ w(u)·B_w with one constant ±1 pattern B_w per weight
//! function, built once.

use std::sync::OnceLock;

use ndarray::Array2;

use crate::specmat::{eye, kron, partial_transpose, re, res, swap, Mat};
use crate::C64;

pub const DIM: usize = 7;

/// Sign convention ξ₁ = −ξ₂ = ξ₃ = 1.
pub const XI: [f64; 3] = [1.0, -1.0, 1.0];

/// Weight of basis label i (index i−1).
pub const WEIGHT: [(i32, i32); 7] = [(1, 1), (1, 0), (0, 1), (0, 0), (0, -1), (-1, 0), (-1, -1)];

#[inline]
pub fn bar(i: usize) -> usize {
    8 - i
}

/// The fourteen scalar weight functions at one spectral point.
#[derive(Clone, Copy, Debug)]
pub struct Weights {
    pub a: C64,
    pub a_bar: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
    pub e: C64,
    pub g: [C64; 8],
}

pub fn weights(u: C64) -> Weights {
    let s2 = std::f64::consts::SQRT_2;
    Weights {
        a: (u + 1.0) * (u + 4.0) * (u + 6.0),
        a_bar: (u + 2.0) * (u + 3.0) * (u + 4.0),
        b: u * (u + 4.0) * (u + 6.0),
        c: u * (u + 3.0) * (u + 6.0),
        d: u * (u + 2.0) * (u + 6.0),
        e: u * (u + 2.0) * (u + 5.0),
        g: [
            (u + 4.0) * (u + 6.0),
            u * (u + 6.0) * s2,
            u * (u + 2.0),
            (u + 2.0) * (u + 6.0) * 2.0,
            u * (u + 4.0) * 2.0,
            (u * 3.0 + 4.0) * (u + 6.0),
            u * (u * 3.0 + 14.0),
            (u + 3.0) * 8.0,
        ],
    }
}

pub fn a(u: C64) -> C64 {
    (u + 1.0) * (u + 4.0) * (u + 6.0)
}

pub fn e(u: C64) -> C64 {
    u * (u + 2.0) * (u + 5.0)
}

/// ρ(u) = a(u)·a(−u).
pub fn rho(u: C64) -> C64 {
    a(u) * a(-u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum W {
    A,
    ABar,
    B,
    C,
    D,
    E,
    G(usize),
}

const N_WEIGHTS: usize = 14;

impl W {
    fn slot(self) -> usize {
        match self {
            W::A => 0,
            W::ABar => 1,
            W::B => 2,
            W::C => 3,
            W::D => 4,
            W::E => 5,
            W::G(k) => 5 + k,
        }
    }
}

/// One term coeff·w(u)·E^i_j ⊗ E^k_l with 1-based labels.
type Term = (W, f64, (usize, usize), (usize, usize));

/// Generators (i,j,k,l) of the √2·u(u+6) block: weight-conserving
/// quadruples with i < l < j, l ≤ k and i+k = j+l ∈ {5,6,7,9,10,11}.
pub fn g2_generators() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for i in 1..=7 {
        for j in 1..=7 {
            for k in 1..=7 {
                for l in 1..=7 {
                    let s = i + k;
                    if !(i < l && l < j && l <= k && s == j + l) || ![5, 6, 7, 9, 10, 11].contains(&s) {
                        continue;
                    }
                    let (wi, wj, wk, wl) = (WEIGHT[i - 1], WEIGHT[j - 1], WEIGHT[k - 1], WEIGHT[l - 1]);
                    if wi.0 + wk.0 == wj.0 + wl.0 && wi.1 + wk.1 == wj.1 + wl.1 {
                        out.push([i, j, k, l]);
                    }
                }
            }
        }
    }
    out
}

fn terms() -> Vec<Term> {
    let mut t: Vec<Term> = Vec::new();
    let mut add = |w: W, c: f64, x: (usize, usize), y: (usize, usize)| t.push((w, c, x, y));
    for i in 1..=7 {
        if i != 4 {
            add(W::A, 1.0, (i, i), (i, i));
            add(W::C, 1.0, (i, i), (4, 4));
            add(W::C, 1.0, (4, 4), (i, i));
            add(W::G(4), 1.0, (4, i), (i, 4));
            add(W::G(4), 1.0, (i, 4), (4, i));
        }
    }
    add(W::ABar, 1.0, (4, 4), (4, 4));
    for i in 1..=3 {
        let ib = bar(i);
        add(W::E, 1.0, (i, i), (ib, ib));
        add(W::E, 1.0, (ib, ib), (i, i));
        add(W::G(8), 1.0, (i, ib), (ib, i));
        add(W::G(8), 1.0, (ib, i), (i, ib));
        let xi = XI[i - 1];
        add(W::G(5), xi, (i, 4), (ib, 4));
        add(W::G(5), xi, (ib, 4), (i, 4));
        add(W::G(5), xi, (4, i), (4, ib));
        add(W::G(5), xi, (4, ib), (4, i));
    }
    for i in [2, 3] {
        let ib = bar(i);
        for (x, y) in [((1, 1), (i, i)), ((i, i), (1, 1)), ((7, 7), (ib, ib)), ((ib, ib), (7, 7)), ((i, i), (i + 3, i + 3)), ((i + 3, i + 3), (i, i))] {
            add(W::B, 1.0, x, y);
        }
        for (x, y) in [((1, i), (i, 1)), ((i, 1), (1, i)), ((7, ib), (ib, 7)), ((ib, 7), (7, ib)), ((i, i + 3), (i + 3, i)), ((i + 3, i), (i, i + 3))] {
            add(W::G(1), 1.0, x, y);
        }
        let xi = XI[i - 1];
        add(W::G(3), 1.0, (i, i + 3), (ib, ib - 3));
        add(W::G(3), 1.0, (ib, ib - 3), (i, i + 3));
        for (x, y) in [((1, i), (7, ib)), ((7, ib), (1, i)), ((i, 1), (ib, 7)), ((ib, 7), (i, 1))] {
            add(W::G(3), -xi, x, y);
        }
        add(W::G(7), 1.0, (i, ib - 3), (ib, i + 3));
        add(W::G(7), 1.0, (ib, i + 3), (i, ib - 3));
        for (x, y) in [((1, ib), (7, i)), ((7, i), (1, ib)), ((ib, 1), (i, 7)), ((i, 7), (ib, 1))] {
            add(W::G(7), -xi, x, y);
        }
    }
    for i in [5, 6] {
        let ib = bar(i);
        for (x, y) in [((1, 1), (i, i)), ((i, i), (1, 1)), ((7, 7), (ib, ib)), ((ib, ib), (7, 7)), ((i, i), (ib + 3, ib + 3)), ((ib, ib), (i - 3, i - 3))] {
            add(W::D, 1.0, x, y);
        }
        for (x, y) in [((1, i), (i, 1)), ((i, 1), (1, i)), ((7, ib), (ib, 7)), ((ib, 7), (7, ib)), ((i, ib + 3), (ib + 3, i)), ((ib, i - 3), (i - 3, ib))] {
            add(W::G(6), 1.0, x, y);
        }
    }
    for [i, j, k, l] in g2_generators() {
        for (cf, x, y) in [
            (1.0, (i, j), (k, l)),
            (1.0, (j, i), (l, k)),
            (1.0, (k, l), (i, j)),
            (1.0, (l, k), (j, i)),
            (-1.0, (i, l), (k, j)),
            (-1.0, (j, k), (l, i)),
            (-1.0, (k, j), (i, l)),
            (-1.0, (l, i), (j, k)),
        ] {
            add(W::G(2), cf, x, y);
        }
    }
    t
}

/// Constant pattern matrices, one per weight function.
fn patterns() -> &'static Vec<Array2<f64>> {
    static P: OnceLock<Vec<Array2<f64>>> = OnceLock::new();
    P.get_or_init(|| {
        let mut p = vec![Array2::<f64>::zeros((49, 49)); N_WEIGHTS];
        for (w, cf, (i, j), (k, l)) in terms() {
            p[w.slot()][[(i - 1) * 7 + (k - 1), (j - 1) * 7 + (l - 1)]] += cf;
        }
        p
    })
}

/// Number of elementary terms in the assembled matrix.
pub fn term_count() -> usize {
    terms().len()
}

/// R₁₂(u) on 7 ⊗ 7.
pub fn r_matrix(u: C64) -> Mat {
    let w = weights(u);
    let vals = [w.a, w.a_bar, w.b, w.c, w.d, w.e, w.g[0], w.g[1], w.g[2], w.g[3], w.g[4], w.g[5], w.g[6], w.g[7]];
    let mut m = Array2::<C64>::zeros((49, 49));
    for (pat, &x) in patterns().iter().zip(vals.iter()) {
        m.zip_mut_with(pat, |o, &p| {
            if p != 0.0 {
                *o += x * p
            }
        });
    }
    m
}

/// Permutation operator on 7 ⊗ 7.
pub fn perm() -> &'static Mat {
    static P: OnceLock<Mat> = OnceLock::new();
    P.get_or_init(|| swap(7, 7))
}

/// R₂₁(u) = P R₁₂(u) P.
pub fn r21(u: C64) -> Mat {
    let p = perm();
    p.dot(&r_matrix(u)).dot(p)
}

/// Crossing matrix V_{i,ī} = (−1)^{i−1}.
pub fn crossing_matrix() -> Mat {
    let mut v = Array2::zeros((7, 7));
    for i in 1..=7 {
        v[[i - 1, bar(i) - 1]] = re(if i % 2 == 1 { 1.0 } else { -1.0 });
    }
    v
}

/// Operators on 7⊗7⊗7 built from a two-site matrix.
pub struct ThreeSite;

impl ThreeSite {
    pub fn r12(m: &Mat) -> Mat {
        kron(m, &eye(7))
    }
    pub fn r23(m: &Mat) -> Mat {
        kron(&eye(7), m)
    }
    pub fn r13(m: &Mat) -> Mat {
        crate::specmat::embed_13(m, 7, 7, 7)
    }
}

/// R₁₂(u−v)R₁₃(u)R₂₃(v) − R₂₃(v)R₁₃(u)R₁₂(u−v).
pub fn check_ybe(u: C64, v: C64) -> f64 {
    let r12 = ThreeSite::r12(&r_matrix(u - v));
    let r13 = ThreeSite::r13(&r_matrix(u));
    let r23 = ThreeSite::r23(&r_matrix(v));
    res(&r12.dot(&r13).dot(&r23), &r23.dot(&r13).dot(&r12))
}

/// R₁₂(u)R₂₁(−u) = ρ(u)·I.
pub fn check_unitarity(u: C64) -> f64 {
    res(&r_matrix(u).dot(&r21(-u)), &(eye(49) * rho(u)))
}

/// Both printed crossing forms, R₁₂(u) = −V₁R₂₁^{t₁}(−u−6)V₁⁻¹ and
/// R₁₂(u) = −V₂^{t₂}R₂₁^{t₂}(−u−6)(V₂^{t₂})⁻¹. Returns the larger residual.
pub fn check_crossing(u: C64) -> f64 {
    let v = crossing_matrix();
    let vt = v.t().to_owned();
    let r = r_matrix(u);
    let x = r21(-u - 6.0);
    let v1 = kron(&v, &eye(7));
    let v1i = kron(&vt, &eye(7)); // V is orthogonal
    let first = v1.dot(&partial_transpose(&x, &[7, 7], 0).unwrap()).dot(&v1i) * re(-1.0);
    let v2 = kron(&eye(7), &vt);
    let v2i = kron(&eye(7), &v);
    let second = v2.dot(&partial_transpose(&x, &[7, 7], 1).unwrap()).dot(&v2i) * re(-1.0);
    res(&r, &first).max(res(&r, &second))
}

/// R₁₂^{t₁}(u)R₂₁^{t₁}(−u−12) = sign·ρ(u+6)·I. The printed sign is −1; the
/// identity holds with +1.
pub fn crossing_unitarity_residual(u: C64, sign: f64) -> f64 {
    let l = partial_transpose(&r_matrix(u), &[7, 7], 0)
        .unwrap()
        .dot(&partial_transpose(&r21(-u - 12.0), &[7, 7], 0).unwrap());
    res(&l, &(eye(49) * (rho(u + 6.0) * sign)))
}

pub fn check_crossing_unitarity(u: C64) -> f64 {
    crossing_unitarity_residual(u, 1.0)
}

/// R(0) = ρ(0)^{1/2}·P = 24·P.
pub fn check_regularity() -> f64 {
    res(&r_matrix(re(0.0)), &(perm() * re(24.0)))
}

/// Orthogonal projectors onto the four irreducible channels of 7 ⊗ 7,
/// extracted from the degenerate points of R.
pub struct ChannelProjectors {
    pub p1: Mat,
    pub p7: Mat,
    pub p14: Mat,
    pub p27: Mat,
}

impl ChannelProjectors {
    pub fn extract() -> crate::Result<Self> {
        use crate::specmat::Projector;
        let p1 = Projector::from_column_space(&r_matrix(re(-6.0)), 1e-8)?.matrix();
        let p7 = Projector::from_column_space(&r_matrix(re(-4.0)), 1e-8)?.matrix();
        let p15 = Projector::from_column_space(&r_matrix(re(-1.0)), 1e-8)?.matrix();
        let p14 = &p15 - &p1;
        let p27 = &(&(&eye(49) - &p1) - &p7) - &p14;
        Ok(ChannelProjectors { p1, p7, p14, p27 })
    }

    pub fn decomposition(&self, u: C64) -> Mat {
        &(&(&self.p1 * ((u - 1.0) * (u + 4.0) * (u - 6.0)) + &(&self.p7 * ((u + 1.0) * (u - 4.0) * (u + 6.0))))
            + &(&self.p14 * ((u - 1.0) * (u + 4.0) * (u + 6.0))))
            + &(&self.p27 * ((u + 1.0) * (u + 4.0) * (u + 6.0)))
    }
}

pub fn check_projector_decomposition(p: &ChannelProjectors, u: C64) -> f64 {
    res(&r_matrix(u), &p.decomposition(u))
}

/// Unit-normalized singlet ψ₀ = (|17⟩−|26⟩+|35⟩−|44⟩+|53⟩−|62⟩+|71⟩)/√7.
pub fn singlet() -> ndarray::Array1<C64> {
    let mut v = ndarray::Array1::zeros(49);
    for i in 1..=7 {
        v[(i - 1) * 7 + bar(i) - 1] = re(if i % 2 == 1 { 1.0 } else { -1.0 } / 7f64.sqrt());
    }
    v
}

/// Numeric ranks of R at the four degenerate points −6, −4, −1, 1.
pub fn rank_profile() -> crate::Result<[usize; 4]> {
    let mut out = [0; 4];
    for (k, u) in [-6.0, -4.0, -1.0, 1.0].iter().enumerate() {
        out[k] = crate::specmat::numeric_rank(&r_matrix(re(*u)), 1e-8)?;
    }
    Ok(out)
}
