//! Fused R- and K-matrices on the 15- and 34-dimensional auxiliary spaces.
//!
//! The boundary-independent part ([`FusionCore`]) is built once per process.
//! Every fused object is stored as a matrix polynomial sampled away from the
//! zeros of its scalar prefactor, so removable singularities never reach a
//! division.
//!
//! Basis conventions:
//! * the 15-dim fused space is the column space of R(−1) (basis `B`); the
//!   objects carrying a "21" ordering use the swapped basis `P·B`;
//! * the 34-dim space is the column space of R̄(−7/2) (basis `C`), its
//!   swapped partner that of R̄₂₁(−7/2) (basis `C'`), and the two are tied
//!   together by a fitted conjugator `Q` on the fused space.

use std::sync::OnceLock;

use ndarray::Array2;
use ndarray_linalg::{Eigh, UPLO};

use crate::boundary::BoundaryParams;
use crate::error::Result;
use crate::gtwo_r::{a, crossing_matrix, e, perm, r21, r_matrix, singlet, ThreeSite};
use crate::specmat::{
    adjoint, eigvals, embed_13, eye, inv, kron, numeric_rank, partial_transpose, re, res,
    spectrum_distance, Mat, Projector, SpectralMatrix,
};
use crate::C64;

pub const KAPPA: f64 = 6.0;
pub const DIM_BAR: usize = 15;
pub const DIM_TILDE: usize = 34;

/// Declared polynomial degrees of R̄, K̄, R̃, K̃.
pub const DEGREES: [usize; 4] = [2, 1, 4, 3];

const RANK_TOL: f64 = 1e-8;

/// ρ̄(u) = (u+7/2)(u+11/2)(u−7/2)(u−11/2).
pub fn rho_bar(u: C64) -> C64 {
    (u + 3.5) * (u + 5.5) * (u - 3.5) * (u - 5.5)
}

/// ρ̃(u) = (u²−9/4)(u²−49/4)(u²−81/4)(u²−169/4).
pub fn rho_tilde(u: C64) -> C64 {
    let s = u * u;
    (s - 2.25) * (s - 12.25) * (s - 20.25) * (s - 42.25)
}

/// (L†⊗I_d)·X·(R⊗I_d).
fn compress(left: &Mat, x: &Mat, right: &Mat, d: usize) -> Mat {
    kron(&adjoint(left), &eye(d)).dot(x).dot(&kron(right, &eye(d)))
}

/// R₂₃(u)R₁₃(u−1) on 7⊗7⊗7.
fn bar_product(u: C64) -> Mat {
    ThreeSite::r23(&r_matrix(u)).dot(&ThreeSite::r13(&r_matrix(u - 1.0)))
}

/// R₃₂(u)R₃₁(u−1) on 7⊗7⊗7.
fn bar_product_swapped(u: C64) -> Mat {
    ThreeSite::r23(&r21(u)).dot(&ThreeSite::r13(&r21(u - 1.0)))
}

fn bar_prefactor(u: C64) -> C64 {
    (u - 1.0) * (u + 1.0) * (u + 4.0) * (u + 6.0)
}

/// Orthonormal vectors of the printed 15-dim list, as columns, with
/// k(i,j) the unit vector |i j⟩.
pub fn printed_psi15() -> Mat {
    let k = |i: usize, j: usize| (i - 1) * 7 + j - 1;
    let (r2, r3, r6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let antisym = |i: usize, j: usize, w: f64| vec![(k(i, j), w), (k(j, i), -w)];
    let mut vecs: Vec<Vec<(usize, f64)>> = Vec::new();
    vecs.push(antisym(1, 2, 1.0 / r2));
    vecs.push(antisym(1, 3, 1.0 / r2));
    for (p, q) in [((1, 4), (2, 3)), ((1, 5), (2, 4)), ((1, 6), (3, 4))] {
        let mut v = antisym(p.0, p.1, 1.0 / r3);
        v.extend(antisym(q.0, q.1, 1.0 / r6));
        vecs.push(v);
    }
    let s19 = 19f64.sqrt();
    vecs.push(vec![
        (k(1, 7), 1.0 / s19),
        (k(7, 1), -3.0 / s19),
        (k(4, 4), 1.0 / s19),
        (k(5, 3), -2.0 / s19),
        (k(6, 2), 2.0 / s19),
    ]);
    vecs.push(antisym(2, 5, 1.0 / r2));
    let s190 = 190f64.sqrt();
    vecs.push(
        [((1, 7), -6.5), ((2, 6), 9.5), ((4, 4), 3.0), ((5, 3), -6.0), ((6, 2), -3.5), ((7, 1), 0.5)]
            .iter()
            .map(|&((i, j), w)| (k(i, j), w / s190))
            .collect(),
    );
    let mut v = antisym(4, 5, 1.0 / r3);
    v.extend(antisym(2, 7, 1.0 / r6));
    vecs.push(v);
    let s210 = 210f64.sqrt();
    vecs.push(
        [
            ((1, 7), -6.5),
            ((2, 6), 0.5),
            ((3, 5), 10.0),
            ((4, 4), -3.0),
            ((5, 3), -4.0),
            ((6, 2), -6.5),
            ((7, 1), -0.5),
        ]
        .iter()
        .map(|&((i, j), w)| (k(i, j), w / s210))
        .collect(),
    );
    vecs.push(antisym(3, 6, 1.0 / r2));
    for (p, q) in [((4, 6), (3, 7)), ((4, 7), (5, 6))] {
        let mut v = antisym(p.0, p.1, 1.0 / r3);
        v.extend(antisym(q.0, q.1, 1.0 / r6));
        vecs.push(v);
    }
    vecs.push(antisym(5, 7, 1.0 / r2));
    vecs.push(antisym(6, 7, 1.0 / r2));
    let mut m = Array2::zeros((49, 15));
    for (col, v) in vecs.iter().enumerate() {
        for &(row, w) in v {
            m[[row, col]] += re(w);
        }
    }
    m
}

/// Diagnostics for the printed 15-dim vector list.
#[derive(Clone, Debug)]
pub struct Psi15Report {
    /// Distance of each listed vector from the column space of R(−1).
    pub distances: Vec<f64>,
    /// Largest off-diagonal Gram entry of the list.
    pub max_overlap: f64,
}

pub fn psi15_report(p15: &Projector) -> Psi15Report {
    let psi = printed_psi15();
    let distances = (0..15).map(|j| p15.distance_of(psi.slice(ndarray::s![.., j..j + 1]))).collect();
    let g = adjoint(&psi).dot(&psi);
    let mut max_overlap = 0f64;
    for i in 0..15 {
        for j in 0..15 {
            if i != j {
                max_overlap = max_overlap.max(g[[i, j]].norm());
            }
        }
    }
    Psi15Report { distances, max_overlap }
}

/// Boundary-independent fusion data.
pub struct FusionCore {
    pub p1: Projector,
    pub p15: Projector,
    /// P·B, basis of the swapped 15-dim projector.
    pub p15_swapped: Mat,
    pub p34: Projector,
    pub p34_swapped: Projector,
    pub q: Mat,
    pub q_inv: Mat,
    pub r_bar: SpectralMatrix,
    pub r_bar_swapped: SpectralMatrix,
    pub r_tilde: SpectralMatrix,
    pub r_tilde_swapped: SpectralMatrix,
    /// R̃₂₁ before conjugation by Q.
    r_tilde_swapped_raw: SpectralMatrix,
}

impl FusionCore {
    /// Shared instance, built on first use.
    pub fn get() -> &'static FusionCore {
        static CORE: OnceLock<FusionCore> = OnceLock::new();
        CORE.get_or_init(|| FusionCore::build().expect("fusion construction"))
    }

    pub fn build() -> Result<Self> {
        let p1 = Projector::from_column_space(&r_matrix(re(-6.0)), RANK_TOL)?;
        let p15 = Projector::from_column_space(&r_matrix(re(-1.0)), RANK_TOL)?;
        let b = p15.basis.clone();
        let bs = perm().dot(&b);

        let r_bar = SpectralMatrix::from_fn(
            |w| {
                let u = w + 0.5;
                compress(&b, &bar_product(u), &b, 7) / bar_prefactor(u)
            },
            DEGREES[0],
            vec![15, 7],
        )?;
        let r_bar_swapped = SpectralMatrix::from_fn(
            |w| {
                let u = w + 0.5;
                compress(&bs, &bar_product_swapped(u), &bs, 7) / bar_prefactor(u)
            },
            DEGREES[0],
            vec![15, 7],
        )?;

        let p34 = Projector::from_column_space(&r_bar.eval(re(-3.5)), RANK_TOL)?;
        let p34_swapped = Projector::from_column_space(&r_bar_swapped.eval(re(-3.5)), RANK_TOL)?;
        let (c, cs) = (&p34.basis, &p34_swapped.basis);

        let r_tilde = SpectralMatrix::from_fn(
            |w| {
                let u = w + 2.5;
                let x = kron(&eye(15), &r_matrix(u)).dot(&embed_13(&r_bar.eval(u - 3.5), 15, 7, 7));
                compress(c, &x, c, 7) / (u + 6.0)
            },
            DEGREES[2],
            vec![34, 7],
        )?;
        let r_tilde_swapped_raw = SpectralMatrix::from_fn(
            |w| {
                let u = w + 2.5;
                let x = kron(&eye(15), &r21(u)).dot(&embed_13(&r_bar_swapped.eval(u - 3.5), 15, 7, 7));
                compress(cs, &x, cs, 7) / (u + 6.0)
            },
            DEGREES[2],
            vec![34, 7],
        )?;

        let q = fit_conjugator(&r_bar, c, cs, &r_tilde, &r_tilde_swapped_raw)?;
        let q_inv = inv(&q)?;
        let (ql, qr) = (kron(&q_inv, &eye(7)), kron(&q, &eye(7)));
        let r_tilde_swapped = r_tilde_swapped_raw.map(|m| ql.dot(m).dot(&qr));

        Ok(FusionCore {
            p1,
            p15,
            p15_swapped: bs,
            p34,
            p34_swapped,
            q,
            q_inv,
            r_bar,
            r_bar_swapped,
            r_tilde,
            r_tilde_swapped,
            r_tilde_swapped_raw,
        })
    }

    /// R̄₁̄₂(u) on 15⊗7.
    pub fn rb(&self, u: C64) -> Mat {
        self.r_bar.eval(u)
    }

    /// R̄₂₁̄(u), stored with the fused factor first.
    pub fn rbq(&self, u: C64) -> Mat {
        self.r_bar_swapped.eval(u)
    }

    pub fn rt(&self, u: C64) -> Mat {
        self.r_tilde.eval(u)
    }

    pub fn rtq(&self, u: C64) -> Mat {
        self.r_tilde_swapped.eval(u)
    }

    /// Crossing matrix of the 15-dim space that makes the fused crossing
    /// relation hold: P·V₂V₁·(I + (2/5)P⁽¹⁾)·P.
    pub fn crossing_bar(&self) -> Mat {
        let v = crossing_matrix();
        let vv = kron(&v, &v);
        let fix = &eye(49) + &(self.p1.matrix() * re(0.4));
        adjoint(&self.p15.basis).dot(&vv).dot(&fix).dot(&self.p15_swapped)
    }

    /// The printed form P·V₂V₁·P.
    pub fn crossing_bar_printed(&self) -> Mat {
        let v = crossing_matrix();
        adjoint(&self.p15.basis).dot(&kron(&v, &v)).dot(&self.p15_swapped)
    }
}

/// Find Q in span{C'†R̄(w₁)C, C'†R̄(w₂)C} such that
/// R̃₂₁,raw(w)(Q⊗I) = (Q⊗I)ρ̃(w)R̃(−w)⁻¹ at two sample points. The span is
/// equivariant, so it contains the intertwiner; the fit picks its direction.
fn fit_conjugator(
    r_bar: &SpectralMatrix,
    c: &Mat,
    cs: &Mat,
    r_tilde: &SpectralMatrix,
    r_tilde_swapped_raw: &SpectralMatrix,
) -> Result<Mat> {
    let basis: Vec<Mat> = [0.7, -1.9]
        .iter()
        .map(|&w| adjoint(cs).dot(&r_bar.eval(re(w))).dot(c))
        .collect();
    let mut cols: Vec<Vec<C64>> = vec![Vec::new(), Vec::new()];
    for w in [0.31, -0.83] {
        let w = re(w);
        let lhs = r_tilde_swapped_raw.eval(w);
        let rhs = inv(&r_tilde.eval(-w))? * rho_tilde(w);
        for (k, qk) in basis.iter().enumerate() {
            let x = kron(qk, &eye(7));
            let d = &lhs.dot(&x) - &x.dot(&rhs);
            cols[k].extend(d.iter().copied());
        }
    }
    let mut gram = Array2::<C64>::zeros((2, 2));
    for i in 0..2 {
        for j in 0..2 {
            gram[[i, j]] = cols[i].iter().zip(&cols[j]).map(|(x, y)| x.conj() * y).sum();
        }
    }
    let (_, vecs) = gram.eigh(UPLO::Lower)?;
    let (x0, x1) = (vecs[[0, 0]], vecs[[1, 0]]);
    Ok(&basis[0] * x0 + &basis[1] * x1)
}

/// Boundary-dependent fused reflection matrices.
pub struct FusedBoundary {
    pub k_bar_minus: SpectralMatrix,
    pub k_bar_plus: SpectralMatrix,
    pub k_tilde_minus: SpectralMatrix,
    pub k_tilde_plus: SpectralMatrix,
}

impl FusedBoundary {
    pub fn new(core: &FusionCore, p: &BoundaryParams) -> Result<Self> {
        let b = &core.p15.basis;
        let bs = &core.p15_swapped;
        let k_bar_minus = SpectralMatrix::from_fn(
            |w| {
                let u = w + 0.5;
                let x = kron(&eye(7), &p.k_minus(u)).dot(&r_matrix(u * 2.0 - 1.0)).dot(&kron(&p.k_minus(u - 1.0), &eye(7)));
                adjoint(b).dot(&x).dot(bs) / ((u - 0.5) * (u + 0.5) * (u + 2.5) * (u - 1.0) * 8.0)
            },
            DEGREES[1],
            vec![15],
        )?;
        let k_bar_plus = SpectralMatrix::from_fn(
            |w| {
                let u = w + 0.5;
                let x = kron(&p.k_plus(u - 1.0), &eye(7))
                    .dot(&r21(-u * 2.0 - 2.0 * KAPPA + 1.0))
                    .dot(&kron(&eye(7), &p.k_plus(u)));
                adjoint(bs).dot(&x).dot(b) / ((u + 2.5) * (u + 4.5) * (u + 5.5) * (u + 6.0) * 8.0)
            },
            DEGREES[1],
            vec![15],
        )?;
        let c = &core.p34.basis;
        let cs = &core.p34_swapped.basis;
        let k_tilde_minus = SpectralMatrix::from_fn(
            |w| {
                let u = w + 2.5;
                let x = kron(&eye(15), &p.k_minus(u))
                    .dot(&core.rb(u * 2.0 - 3.5))
                    .dot(&kron(&k_bar_minus.eval(u - 3.5), &eye(7)));
                adjoint(c).dot(&x).dot(cs).dot(&core.q) / ((u + 1.0) * 4.0)
            },
            DEGREES[3],
            vec![34],
        )?;
        let k_tilde_plus = SpectralMatrix::from_fn(
            |w| {
                let u = w + 2.5;
                let x = kron(&k_bar_plus.eval(u - 3.5), &eye(7))
                    .dot(&core.rbq(-u * 2.0 - 2.0 * KAPPA + 3.5))
                    .dot(&kron(&eye(15), &p.k_plus(u)));
                core.q_inv.dot(&adjoint(cs).dot(&x).dot(c)) / ((u + 6.0) * -4.0)
            },
            DEGREES[3],
            vec![34],
        )?;
        Ok(FusedBoundary { k_bar_minus, k_bar_plus, k_tilde_minus, k_tilde_plus })
    }
}

/// Partial transpose on the fused (first) factor of d⊗7.
fn pt_aux(m: &Mat, d: usize) -> Mat {
    partial_transpose(m, &[d, 7], 0).expect("shape")
}

/// Fused-level accessor used by the generic checks below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Bar,
    Tilde,
}

impl Level {
    pub fn dim(self) -> usize {
        match self {
            Level::Bar => DIM_BAR,
            Level::Tilde => DIM_TILDE,
        }
    }

    fn r(self, core: &FusionCore, u: C64) -> Mat {
        match self {
            Level::Bar => core.rb(u),
            Level::Tilde => core.rt(u),
        }
    }

    fn rq(self, core: &FusionCore, u: C64) -> Mat {
        match self {
            Level::Bar => core.rbq(u),
            Level::Tilde => core.rtq(u),
        }
    }

    fn rho(self, u: C64) -> C64 {
        match self {
            Level::Bar => rho_bar(u),
            Level::Tilde => rho_tilde(u),
        }
    }

    fn k_minus(self, fb: &FusedBoundary, u: C64) -> Mat {
        match self {
            Level::Bar => fb.k_bar_minus.eval(u),
            Level::Tilde => fb.k_tilde_minus.eval(u),
        }
    }

    fn k_plus(self, fb: &FusedBoundary, u: C64) -> Mat {
        match self {
            Level::Bar => fb.k_bar_plus.eval(u),
            Level::Tilde => fb.k_tilde_plus.eval(u),
        }
    }
}

/// Fixed pseudo-random block of `cols` columns for probing large operator
/// identities: A = B holds iff AX = BX for generic X.
fn probe(rows: usize, cols: usize) -> Mat {
    Array2::from_shape_fn((rows, cols), |(i, j)| {
        let k = (i * cols + j) as f64;
        C64::new((k * 0.7548776662).fract() - 0.5, (k * 0.5698402910).fract() - 0.5)
    })
}

/// R₁₂(u−v)R₁₃(u)R₂₃(v) = R₂₃(v)R₁₃(u)R₁₂(u−v) with a fused first factor,
/// applied to a probe block.
pub fn check_fused_ybe(core: &FusionCore, lvl: Level, u: C64, v: C64) -> f64 {
    let d = lvl.dim();
    let r12 = kron(&lvl.r(core, u - v), &eye(7));
    let r13 = embed_13(&lvl.r(core, u), d, 7, 7);
    let r23 = kron(&eye(d), &r_matrix(v));
    let x = probe(d * 49, 4);
    res(&r12.dot(&r13.dot(&r23.dot(&x))), &r23.dot(&r13.dot(&r12.dot(&x))))
}

/// Both unitarity lines: R(u)R₂₁(−u) = ρ(u) and the partially transposed
/// form with −u−12 and ρ(u+6). Returns the larger residual.
pub fn check_fused_unitarity(core: &FusionCore, lvl: Level, u: C64) -> f64 {
    let d = lvl.dim();
    let id = eye(d * 7);
    let first = res(&lvl.r(core, u).dot(&lvl.rq(core, -u)), &(&id * lvl.rho(u)));
    let l = pt_aux(&lvl.r(core, u), d).dot(&pt_aux(&lvl.rq(core, -u - 12.0), d));
    first.max(res(&l, &(&id * lvl.rho(u + 6.0))))
}

/// Both lines of the fused crossing relation for a given crossing matrix.
pub fn fused_crossing_residual(core: &FusionCore, vbar: &Mat, u: C64) -> Result<f64> {
    let i7 = eye(7);
    let vt = vbar.t().to_owned();
    let first = kron(vbar, &i7).dot(&pt_aux(&core.rbq(-u - 6.0), 15)).dot(&kron(&inv(vbar)?, &i7));
    let second = kron(&vt, &i7).dot(&pt_aux(&core.rb(-u - 6.0), 15)).dot(&kron(&inv(&vt)?, &i7));
    Ok(res(&core.rb(u), &first).max(res(&core.rbq(u), &second)))
}

pub fn check_fused_crossing(core: &FusionCore, u: C64) -> Result<f64> {
    fused_crossing_residual(core, &core.crossing_bar(), u)
}

/// Fused reflection equation with a fused first space and K⁻ on the second.
pub fn check_fused_re(core: &FusionCore, fb: &FusedBoundary, p: &BoundaryParams, lvl: Level, u: C64, v: C64) -> f64 {
    let d = lvl.dim();
    let k1 = kron(&lvl.k_minus(fb, u), &eye(7));
    let k2 = kron(&eye(d), &p.k_minus(v));
    let l = lvl.r(core, u - v).dot(&k1).dot(&lvl.rq(core, u + v)).dot(&k2);
    let r = k2.dot(&lvl.r(core, u + v)).dot(&k1).dot(&lvl.rq(core, u - v));
    res(&l, &r)
}

/// Fused dual reflection equation with the −u−v−12 arguments.
pub fn check_fused_dual_re(core: &FusionCore, fb: &FusedBoundary, p: &BoundaryParams, lvl: Level, u: C64, v: C64) -> f64 {
    let d = lvl.dim();
    let k1 = kron(&lvl.k_plus(fb, u), &eye(7));
    let k2 = kron(&eye(d), &p.k_plus(v));
    let w = -u - v - 12.0;
    let l = lvl.r(core, -u + v).dot(&k1).dot(&lvl.rq(core, w)).dot(&k2);
    let r = k2.dot(&lvl.r(core, w)).dot(&k1).dot(&lvl.rq(core, -u + v));
    res(&l, &r)
}

/// Singlet fusion: P⁽¹⁾₂₁R₁₃(u)R₂₃(u−6)P⁽¹⁾₂₁ = a(u)e(u−6)P⁽¹⁾₂₁, and the
/// swapped form with R₃₁, R₃₂. Returns the larger residual.
pub fn check_one_dim_fusion(u: C64) -> f64 {
    let psi = singlet();
    let p1 = Array2::from_shape_fn((49, 49), |(i, j)| psi[i] * psi[j].conj());
    let p1s = perm().dot(&p1).dot(perm());
    let scalar = a(u) * e(u - 6.0);
    let pk = kron(&p1s, &eye(7));
    let x = pk.dot(&ThreeSite::r13(&r_matrix(u))).dot(&ThreeSite::r23(&r_matrix(u - 6.0))).dot(&pk);
    let first = res(&x, &(&pk * scalar));
    let pk = kron(&p1, &eye(7));
    let x = pk.dot(&ThreeSite::r13(&r21(u))).dot(&ThreeSite::r23(&r21(u - 6.0))).dot(&pk);
    first.max(res(&x, &(&pk * scalar)))
}

/// Numeric ranks of R̄(−7/2), R̃(−9/2), R̃(−13/2).
pub fn fused_rank_profile(core: &FusionCore) -> Result<[usize; 3]> {
    Ok([
        numeric_rank(&core.rb(re(-3.5)), RANK_TOL)?,
        numeric_rank(&core.rt(re(-4.5)), RANK_TOL)?,
        numeric_rank(&core.rt(re(-6.5)), RANK_TOL)?,
    ])
}

/// Difference between the stored polynomial times its prefactor and the
/// raw projected product, at a point where the prefactor is nonzero.
pub fn round_trip_residual(core: &FusionCore, w: C64) -> f64 {
    let b = &core.p15.basis;
    let u = w + 0.5;
    let raw = compress(b, &bar_product(u), b, 7);
    let r1 = res(&(core.rb(w) * bar_prefactor(u)), &raw);
    let c = &core.p34.basis;
    let u = w + 2.5;
    let x = kron(&eye(15), &r_matrix(u)).dot(&embed_13(&core.rb(u - 3.5), 15, 7, 7));
    let raw = compress(c, &x, c, 7);
    let r2 = res(&(core.rt(w) * (u + 6.0)), &raw);
    let raw_q = &core.r_tilde_swapped_raw.eval(w) * (u + 6.0);
    let conj = kron(&core.q, &eye(7)).dot(&core.rtq(w)).dot(&kron(&core.q_inv, &eye(7))) * (u + 6.0);
    r1.max(r2).max(res(&raw_q, &conj))
}

/// Degree excess of each fused object tested against one degree lower than
/// declared. Large values show the declared degree is tight.
pub fn degree_tightness(core: &FusionCore, fb: &FusedBoundary) -> [f64; 4] {
    let drop = |m: &SpectralMatrix| crate::specmat::degree_excess(&|u| m.eval(u), m.degree() - 1);
    [drop(&core.r_bar), drop(&fb.k_bar_minus), drop(&core.r_tilde), drop(&fb.k_tilde_minus)]
}

/// Spectrum-level checks of the 49- and 7-dimensional fusions of R̃ and K̃.
/// Returns (R-line distance, K-line distance) for the 49 and 7 channels.
pub fn check_higher_fusion(core: &FusionCore, fb: &FusedBoundary, p: &BoundaryParams, u: C64) -> Result<[(f64, f64); 2]> {
    let i7 = eye(7);
    let mut out = [(0.0, 0.0); 2];
    for (slot, (dim, pt)) in [(49usize, -4.5), (7usize, -6.5)].into_iter().enumerate() {
        let cb = Projector::from_column_space(&core.rt(re(pt)), RANK_TOL)?;
        let cq = Projector::from_column_space(&core.rtq(re(pt)), RANK_TOL)?;
        debug_assert_eq!(cb.rank(), dim);
        // (B†⊗I)·(I⊗R)·R̃₁₃·(B⊗I), associated so no 1666×1666 product forms
        let right = kron(&cb.basis, &eye(7));
        let x = kron(&eye(34), &r_matrix(u)).dot(&embed_13(&core.rt(u + pt), 34, 7, 7).dot(&right));
        let lhs = adjoint(&right).dot(&x);
        let km = kron(&eye(34), &p.k_minus(u))
            .dot(&core.rt(u * 2.0 + pt))
            .dot(&kron(&fb.k_tilde_minus.eval(u + pt), &i7));
        let kp = kron(&fb.k_tilde_plus.eval(u + pt), &i7)
            .dot(&core.rtq(-u * 2.0 - 12.0 - pt))
            .dot(&kron(&eye(34), &p.k_plus(u)));
        let kml = adjoint(&cb.basis).dot(&km).dot(&cq.basis);
        let kpl = adjoint(&cq.basis).dot(&kp).dot(&cb.basis);
        let (r_rhs, kp_r, km_r) = if dim == 49 {
            let rhs = ThreeSite::r13(&r_matrix(u - 2.0)).dot(&ThreeSite::r23(&r_matrix(u - 5.0))) * (u + 6.0);
            let km_r = kron(&p.k_minus(u - 2.0), &i7)
                .dot(&r21(u * 2.0 - 7.0))
                .dot(&kron(&i7, &p.k_minus(u - 5.0)))
                * ((u + 1.0) * (u * 2.0 + 1.0) * (u * 2.0 - 1.0) * -2.0);
            let kp_r = kron(&i7, &p.k_plus(u - 5.0))
                .dot(&r_matrix(-u * 2.0 - 5.0))
                .dot(&kron(&p.k_plus(u - 2.0), &i7))
                * ((u + 6.0) * (u * 2.0 + 5.0) * (u * 2.0 - 3.0) * 2.0);
            (rhs, kp_r, km_r)
        } else {
            let rhs = r_matrix(u - 7.0) * ((u - 4.0) * a(u));
            let km_r = p.k_minus(u - 7.0)
                * ((u - 4.0) * (u - 1.0) * (u * 2.0 - 11.0) * (u * 2.0 - 1.0) * (u * 2.0 - 5.0) * (u * 2.0 - 3.0) * (u * 2.0 + 1.0) * 4.0);
            let kp_r = p.k_plus(u - 7.0)
                * ((u + 1.0) * (u + 6.0) * (u * 2.0 - 7.0) * (u * 2.0 - 5.0) * (u * 2.0 + 1.0) * (u * 2.0 + 3.0) * (u * 2.0 + 5.0) * -4.0);
            (rhs, kp_r, km_r)
        };
        let r_line = spectrum_distance(&eigvals(&lhs)?, &eigvals(&r_rhs)?);
        let k_line = spectrum_distance(&eigvals(&kpl.dot(&kml))?, &eigvals(&kp_r.dot(&km_r))?);
        out[slot] = (r_line, k_line);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specmat::c;

    fn core() -> &'static FusionCore {
        FusionCore::get()
    }

    #[test]
    fn projector_ranks() {
        let k = core();
        assert_eq!(k.p1.rank(), 1);
        assert_eq!(k.p15.rank(), 15);
        assert_eq!(k.p34.rank(), 34);
        assert_eq!(k.p34_swapped.rank(), 34);
        assert_eq!(fused_rank_profile(k).unwrap(), [34, 49, 7]);
    }

    #[test]
    fn singlet_matches_column_space() {
        let psi = singlet();
        let overlap: C64 = core().p1.basis.column(0).iter().zip(psi.iter()).map(|(x, y)| x.conj() * y).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn printed_psi15_list_is_not_a_basis_of_the_column_space() {
        let rep = psi15_report(&core().p15);
        assert!(rep.max_overlap > 0.4);
        let failing: Vec<usize> = rep.distances.iter().enumerate().filter(|(_, &d)| d > 1e-6).map(|(i, _)| i + 1).collect();
        assert_eq!(failing, vec![3, 4, 5, 9, 10, 12, 13]);
    }

    #[test]
    fn fused_unitarity_and_ybe() {
        let k = core();
        for lvl in [Level::Bar, Level::Tilde] {
            assert!(check_fused_unitarity(k, lvl, re(0.37)) < 1e-11);
            assert!(check_fused_ybe(k, lvl, re(0.37), re(-1.21)) < 1e-11);
        }
    }

    #[test]
    fn fused_crossing_corrected_vs_printed() {
        let k = core();
        assert!(check_fused_crossing(k, re(0.43)).unwrap() < 1e-12);
        let printed = fused_crossing_residual(k, &k.crossing_bar_printed(), re(0.43)).unwrap();
        assert!(printed > 0.05, "{printed}");
    }

    #[test]
    fn reflection_equations() {
        let k = core();
        let p = BoundaryParams::from_pairs(c(0.8, 0.1), re(1.3), crate::boundary::Branch::Plus, re(0.6), c(0.9, -0.2), crate::boundary::Branch::Minus).unwrap();
        let fb = FusedBoundary::new(k, &p).unwrap();
        for lvl in [Level::Bar, Level::Tilde] {
            assert!(check_fused_re(k, &fb, &p, lvl, re(0.41), re(-0.77)) < 1e-11);
            assert!(check_fused_dual_re(k, &fb, &p, lvl, re(0.41), re(-0.77)) < 1e-11);
        }
        let t = degree_tightness(k, &fb);
        assert!(t.iter().all(|&r| r > 1e-3), "{t:?}");
        for (r, kk) in check_higher_fusion(k, &fb, &p, re(0.37)).unwrap() {
            assert!(r < 1e-9 && kk < 1e-9, "{r} {kk}");
        }
    }

    #[test]
    fn singlet_fusion_and_round_trip() {
        assert!(check_one_dim_fusion(re(0.9)) < 1e-12);
        assert!(check_one_dim_fusion(re(-1.0)) < 1e-12);
        assert!(round_trip_residual(core(), re(0.29)) < 1e-11);
    }
}
