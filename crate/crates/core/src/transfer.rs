//! Monodromy and transfer matrices of the fundamental and fused chains,
//! open and periodic, plus the Hamiltonian and exact diagonalization.
//!
//! Operators on `aux ⊗ V₁ ⊗ … ⊗ V_N` are kept as a `d × d` grid of quantum
//! blocks (`Array4` indexed `[a, b, i, j]`). Adding a site is one GEMM, and
//! the auxiliary trace of the double-row product is another, so nothing of
//! size `(d·7^N)²` squared is ever multiplied.

use std::sync::OnceLock;

use ndarray::{Array2, Array4, Axis};
use ndarray_linalg::Eig;
use serde::Serialize;

use crate::boundary::BoundaryParams;
use crate::error::{Error, Result};
use crate::fusion::{FusedBoundary, FusionCore};
use crate::gtwo_r::{r21, r_matrix};
use crate::specmat::{eye, from_blocks, re, res, to_blocks, Mat, SpectralMatrix};
use crate::C64;

pub mod checks;

/// Largest chain handled by the dense routines.
pub const MAX_SITES: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Fund,
    Bar,
    Tilde,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Fund, Kind::Bar, Kind::Tilde];

    pub fn aux_dim(self) -> usize {
        match self {
            Kind::Fund => 7,
            Kind::Bar => 15,
            Kind::Tilde => 34,
        }
    }
}

impl std::str::FromStr for Kind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fund" => Ok(Kind::Fund),
            "bar" => Ok(Kind::Bar),
            "tilde" => Ok(Kind::Tilde),
            other => Err(Error::Config(format!("unknown transfer kind '{other}' (expected fund|bar|tilde)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reflected,
}

#[derive(Clone, Copy, Debug)]
pub enum Boundary {
    Open(BoundaryParams),
    Periodic,
}

#[derive(Clone, Debug)]
pub struct ChainSpec {
    pub thetas: Vec<C64>,
    pub boundary: Boundary,
}

impl ChainSpec {
    pub fn open(thetas: Vec<C64>, params: BoundaryParams) -> Self {
        ChainSpec { thetas, boundary: Boundary::Open(params) }
    }

    pub fn periodic(thetas: Vec<C64>) -> Self {
        ChainSpec { thetas, boundary: Boundary::Periodic }
    }

    pub fn n_sites(&self) -> usize {
        self.thetas.len()
    }

    /// Pairs (i, j) with θ_i ± θ_j too close for the identity checks at ±θ.
    pub fn degeneracy_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.thetas.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let (a, b) = (self.thetas[i], self.thetas[j]);
                if (a - b).norm() < 1e-6 || (a + b).norm() < 1e-6 {
                    out.push(format!("theta_{} and theta_{} are degenerate (|θi ± θj| < 1e-6)", i + 1, j + 1));
                }
            }
        }
        out
    }
}

/// A chain with its boundary data; fused objects are built on first use.
pub struct Chain {
    pub spec: ChainSpec,
    fused: OnceLock<FusedBoundary>,
}

fn identity_blocks(d: usize) -> Array4<C64> {
    let mut t = Array4::zeros((d, d, 1, 1));
    for a in 0..d {
        t[[a, a, 0, 0]] = re(1.0);
    }
    t
}

/// new[a,b,(i,s),(j,t)] = Σ_c T[a,c,i,j]·R[c,b,s,t].
fn append_site(t: &Array4<C64>, r: &Array4<C64>) -> Array4<C64> {
    let (d, _, q, _) = t.dim();
    let tm = t
        .view()
        .permuted_axes([0, 2, 3, 1])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d * q * q, d))
        .expect("layout");
    let rm = r.as_standard_layout().into_owned().into_shape_with_order((d, d * 49)).expect("layout");
    let m = tm.dot(&rm).into_shape_with_order((d, q, q, d, 7, 7)).expect("layout");
    m.permuted_axes([0, 3, 1, 4, 2, 5])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d, d, q * 7, q * 7))
        .expect("layout")
}

/// new[a,b,(i,s),(j,t)] = Σ_c R[a,c,s,t]·H[c,b,i,j].
fn prepend_site(h: &Array4<C64>, r: &Array4<C64>) -> Array4<C64> {
    let (d, _, q, _) = h.dim();
    let rm = r
        .view()
        .permuted_axes([0, 2, 3, 1])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d * 49, d))
        .expect("layout");
    let hm = h.as_standard_layout().into_owned().into_shape_with_order((d, d * q * q)).expect("layout");
    let m = rm.dot(&hm).into_shape_with_order((d, 7, 7, d, q, q)).expect("layout");
    m.permuted_axes([0, 3, 4, 1, 5, 2])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d, d, q * 7, q * 7))
        .expect("layout")
}

/// Left-multiply the auxiliary index by a d×d matrix: out[a,c] = Σ_b K[a,b]·T[b,c].
fn aux_left(k: &Mat, t: &Array4<C64>) -> Array4<C64> {
    let (d, _, q, _) = t.dim();
    let tm = t.as_standard_layout().into_owned().into_shape_with_order((d, d * q * q)).expect("layout");
    k.dot(&tm).into_shape_with_order((d, d, q, q)).expect("layout")
}

/// tr_aux of the product of two block operators.
fn trace_product(x: &Array4<C64>, y: &Array4<C64>) -> Mat {
    let (d, _, q, _) = x.dim();
    let xm = x
        .view()
        .permuted_axes([2, 0, 1, 3])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((q, d * d * q))
        .expect("layout");
    let ym = y
        .view()
        .permuted_axes([1, 0, 2, 3])
        .as_standard_layout()
        .into_owned()
        .into_shape_with_order((d * d * q, q))
        .expect("layout");
    xm.dot(&ym)
}

fn block_trace(t: &Array4<C64>) -> Mat {
    let (d, _, q, _) = t.dim();
    let mut out = Array2::zeros((q, q));
    for a in 0..d {
        out += &t.slice(ndarray::s![a, a, .., ..]);
    }
    out
}

impl Chain {
    pub fn new(spec: ChainSpec) -> Result<Self> {
        let n = spec.n_sites();
        if n == 0 || n > MAX_SITES {
            return Err(Error::SizeGuard(format!("n_sites = {n}, supported range 1..={MAX_SITES}")));
        }
        Ok(Chain { spec, fused: OnceLock::new() })
    }

    pub fn n_sites(&self) -> usize {
        self.spec.n_sites()
    }

    pub fn dim(&self) -> usize {
        7usize.pow(self.n_sites() as u32)
    }

    pub fn is_open(&self) -> bool {
        matches!(self.spec.boundary, Boundary::Open(_))
    }

    pub fn params(&self) -> Option<&BoundaryParams> {
        match &self.spec.boundary {
            Boundary::Open(p) => Some(p),
            Boundary::Periodic => None,
        }
    }

    fn fused(&self) -> &FusedBoundary {
        self.fused.get_or_init(|| {
            let p = self.params().expect("fused K needs an open chain");
            FusedBoundary::new(FusionCore::get(), p).expect("fused boundary")
        })
    }

    /// Declared polynomial degree of the transfer matrix of a given kind.
    pub fn degree(&self, kind: Kind) -> usize {
        let n = self.n_sites();
        match (self.is_open(), kind) {
            (true, Kind::Fund) => 6 * n + 2,
            (true, Kind::Bar) => 4 * n + 2,
            (true, Kind::Tilde) => 8 * n + 6,
            (false, Kind::Fund) => 3 * n,
            (false, Kind::Bar) => 2 * n,
            (false, Kind::Tilde) => 4 * n,
        }
    }

    /// Refuse sizes whose block storage would exceed a few hundred MB.
    pub fn check_size(&self, kind: Kind) -> Result<()> {
        let d = kind.aux_dim();
        let q = self.dim();
        if d * d * q * q > 40_000_000 {
            return Err(Error::SizeGuard(format!("{kind:?} transfer at N = {} needs {} block entries", self.n_sites(), d * d * q * q)));
        }
        Ok(())
    }

    /// Auxiliary-site matrix R_{0j}(u) on d⊗7.
    pub fn aux_r(kind: Kind, u: C64) -> Mat {
        match kind {
            Kind::Fund => r_matrix(u),
            Kind::Bar => FusionCore::get().rb(u),
            Kind::Tilde => FusionCore::get().rt(u),
        }
    }

    /// R_{j0}(u) stored with the auxiliary factor first.
    pub fn aux_r_reflected(kind: Kind, u: C64) -> Mat {
        match kind {
            Kind::Fund => r21(u),
            Kind::Bar => FusionCore::get().rbq(u),
            Kind::Tilde => FusionCore::get().rtq(u),
        }
    }

    fn k_minus(&self, kind: Kind, u: C64) -> Mat {
        match kind {
            Kind::Fund => self.params().expect("open").k_minus(u),
            Kind::Bar => self.fused().k_bar_minus.eval(u),
            Kind::Tilde => self.fused().k_tilde_minus.eval(u),
        }
    }

    fn k_plus(&self, kind: Kind, u: C64) -> Mat {
        match kind {
            Kind::Fund => self.params().expect("open").k_plus(u),
            Kind::Bar => self.fused().k_bar_plus.eval(u),
            Kind::Tilde => self.fused().k_tilde_plus.eval(u),
        }
    }

    /// T₀(u) = R₀₁(u−θ₁)⋯R₀N(u−θ_N) as blocks.
    pub fn forward_blocks(&self, kind: Kind, u: C64) -> Array4<C64> {
        let d = kind.aux_dim();
        let mut t = identity_blocks(d);
        for &th in &self.spec.thetas {
            t = append_site(&t, &to_blocks(&Self::aux_r(kind, u - th), d, 7));
        }
        t
    }

    /// T̂₀(u) = R_{N0}(u+θ_N)⋯R₁₀(u+θ₁) as blocks.
    pub fn reflected_blocks(&self, kind: Kind, u: C64) -> Array4<C64> {
        let d = kind.aux_dim();
        let mut h = identity_blocks(d);
        for &th in &self.spec.thetas {
            h = prepend_site(&h, &to_blocks(&Self::aux_r_reflected(kind, u + th), d, 7));
        }
        h
    }

    /// Full monodromy matrix on aux ⊗ quantum space.
    pub fn monodromy(&self, kind: Kind, dir: Direction, u: C64) -> Mat {
        match dir {
            Direction::Forward => from_blocks(&self.forward_blocks(kind, u)),
            Direction::Reflected => from_blocks(&self.reflected_blocks(kind, u)),
        }
    }

    /// Transfer matrix of the given kind on the 7^N-dim quantum space.
    pub fn transfer(&self, kind: Kind, u: C64) -> Mat {
        match &self.spec.boundary {
            Boundary::Periodic => block_trace(&self.forward_blocks(kind, u)),
            Boundary::Open(_) => {
                let x = aux_left(&self.k_plus(kind, u), &self.forward_blocks(kind, u));
                let y = aux_left(&self.k_minus(kind, u), &self.reflected_blocks(kind, u));
                trace_product(&x, &y)
            }
        }
    }

    /// Open transfer matrix of the fundamental chain with caller-supplied
    /// reflection matrices.
    pub fn transfer_with(&self, k_plus: &Mat, k_minus: &Mat, u: C64) -> Mat {
        let x = aux_left(k_plus, &self.forward_blocks(Kind::Fund, u));
        let y = aux_left(k_minus, &self.reflected_blocks(Kind::Fund, u));
        trace_product(&x, &y)
    }

    pub fn t(&self, u: C64) -> Mat {
        self.transfer(Kind::Fund, u)
    }

    pub fn tb(&self, u: C64) -> Mat {
        self.transfer(Kind::Bar, u)
    }

    pub fn tt(&self, u: C64) -> Mat {
        self.transfer(Kind::Tilde, u)
    }

    /// The transfer matrix as a polynomial, with its degree verified at a
    /// held-out node.
    pub fn transfer_poly(&self, kind: Kind) -> Result<SpectralMatrix> {
        self.check_size(kind)?;
        SpectralMatrix::from_fn(|u| self.transfer(kind, u), self.degree(kind), vec![7; self.n_sites()])
    }

    /// H = t'(0)·t(0)⁻¹ by a fourth-order central difference with h = 1e-5.
    /// Requires t(0) ∝ id, which holds only on the homogeneous open chain.
    pub fn hamiltonian(&self) -> Result<Mat> {
        if !self.is_open() {
            return Err(Error::Config("the Hamiltonian is defined for the open chain".into()));
        }
        let t0 = self.t(re(0.0));
        let q = self.dim();
        let scale = t0.diag().sum() / re(q as f64);
        let r = res(&t0, &(eye(q) * scale));
        if r > 1e-10 {
            return Err(Error::NotHomogeneous(r));
        }
        let h = 1e-5;
        let d = (&(&self.t(re(h)) - &self.t(re(-h))) * re(8.0) - (&self.t(re(2.0 * h)) - &self.t(re(-2.0 * h)))) / re(12.0 * h);
        Ok(d / scale)
    }
}

/// Eigen-decomposition of a transfer matrix with grouped levels.
#[derive(Clone, Debug)]
pub struct Spectrum {
    /// Eigenvalues sorted by real part, descending.
    pub eigenvalues: Vec<C64>,
    /// Eigenvectors as columns, in the order of `eigenvalues`.
    pub vectors: Mat,
    /// Distinct levels (representative, multiplicity), same order.
    pub levels: Vec<(C64, usize)>,
}

/// Group values within `rel_tol · max(1, |λ|)` of an existing level.
pub fn group_levels(values: &[C64], rel_tol: f64) -> Vec<(C64, usize)> {
    let mut levels: Vec<(C64, usize)> = Vec::new();
    for &v in values {
        match levels.iter_mut().find(|(l, _)| (v - *l).norm() <= rel_tol * l.norm().max(1.0)) {
            Some(entry) => entry.1 += 1,
            None => levels.push((v, 1)),
        }
    }
    levels.sort_by(|a, b| b.0.re.total_cmp(&a.0.re));
    levels
}

pub fn diagonalize(m: &Mat, rel_tol: f64) -> Result<Spectrum> {
    let (vals, vecs) = m.eig()?;
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].re.total_cmp(&vals[i].re));
    let eigenvalues: Vec<C64> = order.iter().map(|&i| vals[i]).collect();
    let vectors = vecs.select(Axis(1), &order);
    let levels = group_levels(&eigenvalues, rel_tol);
    Ok(Spectrum { eigenvalues, vectors, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specmat::kron;

    fn table_chain(n: usize) -> Chain {
        Chain::new(ChainSpec::open(vec![re(0.0); n], BoundaryParams::table())).unwrap()
    }

    #[test]
    fn single_site_forward_monodromy_is_r() {
        let ch = Chain::new(ChainSpec::periodic(vec![re(0.0)])).unwrap();
        let u = re(0.37);
        assert!(res(&ch.monodromy(Kind::Fund, Direction::Forward, u), &r_matrix(u)) < 1e-15);
        assert!(res(&ch.monodromy(Kind::Fund, Direction::Reflected, u), &r21(u)) < 1e-15);
    }

    #[test]
    fn two_site_monodromy_matches_dense_product() {
        let th = [re(0.3), re(-0.55)];
        let ch = Chain::new(ChainSpec::periodic(th.to_vec())).unwrap();
        let u = re(0.81);
        // aux ⊗ V1 ⊗ V2
        let r01 = kron(&r_matrix(u - th[0]), &eye(7));
        let r02 = crate::specmat::embed_13(&r_matrix(u - th[1]), 7, 7, 7);
        assert!(res(&ch.monodromy(Kind::Fund, Direction::Forward, u), &r01.dot(&r02)) < 1e-14);
        let r10 = kron(&r21(u + th[0]), &eye(7));
        let r20 = crate::specmat::embed_13(&r21(u + th[1]), 7, 7, 7);
        assert!(res(&ch.monodromy(Kind::Fund, Direction::Reflected, u), &r20.dot(&r10)) < 1e-14);
    }

    #[test]
    fn open_transfer_at_zero() {
        let ch = table_chain(1);
        assert!(res(&ch.t(re(0.0)), &(eye(7) * re(-2880.0))) < 1e-12);
    }

    #[test]
    fn transfer_matches_dense_trace() {
        let ch = Chain::new(ChainSpec::open(vec![re(0.2), re(0.7)], BoundaryParams::table())).unwrap();
        let u = re(0.45);
        let p = ch.params().unwrap();
        let big = kron(&p.k_plus(u), &eye(49))
            .dot(&ch.monodromy(Kind::Fund, Direction::Forward, u))
            .dot(&kron(&p.k_minus(u), &eye(49)))
            .dot(&ch.monodromy(Kind::Fund, Direction::Reflected, u));
        let dense = crate::specmat::partial_trace(&big, &[7, 49], 0).unwrap();
        assert!(res(&ch.t(u), &dense) < 1e-13);
    }

    #[test]
    fn table_one_spectrum() {
        let ch = table_chain(1);
        let sp = diagonalize(&ch.t(re(0.1 * 2f64.sqrt())), 1e-8).unwrap();
        assert_eq!(sp.levels.len(), 4);
        let want = [-1906.599, -2427.0809, -4691.3338, -5951.5545];
        for ((l, _), w) in sp.levels.iter().zip(want) {
            assert!((l - w).norm() / w.abs() < 1e-6, "{l} vs {w}");
        }
    }

    #[test]
    fn size_guard() {
        assert!(Chain::new(ChainSpec::periodic(vec![re(0.0); 4])).is_err());
        let ch = Chain::new(ChainSpec::periodic(vec![re(0.0); 3])).unwrap();
        assert!(ch.check_size(Kind::Tilde).is_err());
        assert!(ch.check_size(Kind::Fund).is_ok());
    }

    #[test]
    fn grouping() {
        let v = [re(1.0), re(1.0 + 1e-12), re(-3.0)];
        assert_eq!(group_levels(&v, 1e-8), vec![(re(1.0), 2), (re(-3.0), 1)]);
    }
}
