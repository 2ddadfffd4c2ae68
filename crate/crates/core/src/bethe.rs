//! T-Q relations, Bethe equations and the Newton solver.
//!
//! Roots are stored as the μ values that enter the Q-functions
//! (`Q¹(u) = Π (iu + μ + i/2)(iu − μ + i/2)` on the open chain). The
//! published tables list exactly these values.

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boundary::BoundaryParams;
use crate::error::{Error, Result};
use crate::gtwo_r::{a, e, rho, weights};
use crate::report::Report;
use crate::specmat::{c, re};
use crate::transfer::{Boundary, ChainSpec, Kind};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Open,
    Periodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BetheRoots {
    pub mu1: Vec<C64>,
    pub mu2: Vec<C64>,
    pub mode: Mode,
}

impl BetheRoots {
    pub fn empty(mode: Mode) -> Self {
        Self { mu1: vec![], mu2: vec![], mode }
    }

    pub fn new(mu1: Vec<C64>, mu2: Vec<C64>, mode: Mode) -> Result<Self> {
        if mode == Mode::Open && mu1.len() != mu2.len() {
            return Err(Error::Config(format!("open chain needs L2 = L1, got {} and {}", mu1.len(), mu2.len())));
        }
        let r = Self { mu1, mu2, mode };
        r.check_collisions()?;
        Ok(r)
    }

    fn check_collisions(&self) -> Result<()> {
        for (name, set) in [("mu1", &self.mu1), ("mu2", &self.mu2)] {
            for i in 0..set.len() {
                // μ = 0 is its own mirror image on the open chain
                if self.mode == Mode::Open && set[i].norm() < 1e-8 {
                    return Err(Error::RootCollision(format!("{name}[{i}] = {}", set[i]), format!("-{name}[{i}]")));
                }
                for j in i + 1..set.len() {
                    let close = (set[i] - set[j]).norm() < 1e-8 || (self.mode == Mode::Open && (set[i] + set[j]).norm() < 1e-8);
                    if close {
                        return Err(Error::RootCollision(format!("{name}[{i}] = {}", set[i]), format!("{name}[{j}] = {}", set[j])));
                    }
                }
            }
        }
        Ok(())
    }

    /// Sign-fixed, sorted copy used for deduplication. On the open chain
    /// each Q-factor pairs ±μ, so μ and −μ are the same root.
    pub fn canonical(&self) -> Self {
        let fix = |z: C64| {
            if self.mode == Mode::Open && (z.re < -1e-9 || (z.re.abs() <= 1e-9 && z.im < 0.0)) {
                -z
            } else {
                z
            }
        };
        let sort = |v: &[C64]| {
            let mut v: Vec<C64> = v.iter().map(|&z| fix(z)).collect();
            v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            v
        };
        Self { mu1: sort(&self.mu1), mu2: sort(&self.mu2), mode: self.mode }
    }

    pub fn same_as(&self, other: &Self, tol: f64) -> bool {
        let (p, q) = (self.canonical(), other.canonical());
        let close = |x: &[C64], y: &[C64]| {
            x.len() == y.len() && {
                // sorting can split near-ties, so match greedily instead
                let mut used = vec![false; y.len()];
                x.iter().all(|&z| {
                    match (0..y.len()).find(|&k| !used[k] && (y[k] - z).norm() <= tol * z.norm().max(1.0)) {
                        Some(k) => {
                            used[k] = true;
                            true
                        }
                        None => false,
                    }
                })
            }
        };
        close(&p.mu1, &q.mu1) && close(&p.mu2, &q.mu2)
    }

    fn flat(&self) -> Vec<C64> {
        self.mu1.iter().chain(&self.mu2).copied().collect()
    }

    fn with_flat(&self, z: &[C64]) -> Self {
        let l1 = self.mu1.len();
        Self { mu1: z[..l1].to_vec(), mu2: z[l1..].to_vec(), mode: self.mode }
    }
}

/// Chain data entering the T-Q relations.
#[derive(Clone, Debug)]
pub struct TQContext {
    pub thetas: Vec<C64>,
    pub mode: Mode,
    /// Coefficient of the inhomogeneous terms; zero on the periodic chain.
    pub x: C64,
    /// Leading coefficient of Λ.
    pub big_a: C64,
}

impl TQContext {
    pub fn open(thetas: Vec<C64>, p: &BoundaryParams) -> Self {
        Self { thetas, mode: Mode::Open, x: p.x(), big_a: p.big_a() }
    }

    pub fn periodic(thetas: Vec<C64>) -> Self {
        Self { thetas, mode: Mode::Periodic, x: re(0.0), big_a: re(7.0) }
    }

    pub fn from_spec(spec: &ChainSpec) -> Self {
        match &spec.boundary {
            Boundary::Open(p) => Self::open(spec.thetas.clone(), p),
            Boundary::Periodic => Self::periodic(spec.thetas.clone()),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.thetas.len()
    }

    /// Π_j w(u−θ_j)·w(u+θ_j) on the open chain, Π_j w(u−θ_j) on the periodic one.
    fn site_product(&self, u: C64, w: impl Fn(C64) -> C64) -> C64 {
        match self.mode {
            Mode::Open => self.thetas.iter().map(|&t| w(u - t) * w(u + t)).product(),
            Mode::Periodic => self.thetas.iter().map(|&t| w(u - t)).product(),
        }
    }

    /// Polynomial degree of the eigenvalue of the given kind.
    pub fn degree(&self, kind: Kind) -> usize {
        let n = self.n_sites();
        match (self.mode, kind) {
            (Mode::Open, Kind::Fund) => 6 * n + 2,
            (Mode::Open, Kind::Bar) => 4 * n + 2,
            (Mode::Open, Kind::Tilde) => 8 * n + 6,
            (Mode::Periodic, Kind::Fund) => 3 * n,
            (Mode::Periodic, Kind::Bar) => 2 * n,
            (Mode::Periodic, Kind::Tilde) => 4 * n,
        }
    }

    /// Leading coefficients of Λ, Λ̄, Λ̃.
    pub fn leading(&self) -> [C64; 3] {
        match self.mode {
            Mode::Open => {
                let a8 = self.big_a / 8.0;
                [self.big_a, (-a8 * a8 + a8 + 0.75) * 16.0, (a8 * a8 * 1.5 + self.big_a / 16.0 + 0.375) * -128.0]
            }
            Mode::Periodic => [re(7.0), re(15.0), re(34.0)],
        }
    }
}

/// Q¹ (which = 1) or Q² (which = 2). The open chain pairs ±μ in each
/// factor; the periodic chain uses the one-sided product.
pub fn q_fn(which: u8, roots: &BetheRoots, u: C64) -> C64 {
    let (set, shift) = match which {
        1 => (&roots.mu1, I * 0.5),
        _ => (&roots.mu2, I * 2.0),
    };
    let iu = I * u + shift;
    match roots.mode {
        Mode::Open => set.iter().map(|&m| (iu + m) * (iu - m)).product(),
        Mode::Periodic => set.iter().map(|&m| iu + m).product(),
    }
}

/// The seven Z-functions and two f-functions at one point.
#[derive(Clone, Copy, Debug)]
pub struct ZSet {
    pub z: [C64; 7],
    pub f: [C64; 2],
}

impl ZSet {
    fn sum(&self, from: usize, to: usize) -> C64 {
        self.z[from - 1..to].iter().sum()
    }
}

fn finite(v: C64, u: C64) -> Result<C64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Pole(format!("{u}")))
    }
}

fn ratio(num: C64, den: C64, u: C64) -> Result<C64> {
    if den.norm() < 1e-12 {
        return Err(Error::Pole(format!("{u}")));
    }
    finite(num / den, u)
}

/// Z₁…Z₇ and f₁, f₂ (zero on the periodic chain).
pub fn z_all(ctx: &TQContext, roots: &BetheRoots, u: C64) -> Result<ZSet> {
    let q1 = |s: f64| q_fn(1, roots, u + s);
    let q2 = |s: f64| q_fn(2, roots, u + s);
    let pa = ctx.site_product(u, a);
    let pb = ctx.site_product(u, |v| weights(v).b);
    let pc = ctx.site_product(u, |v| weights(v).c);
    let pd = ctx.site_product(u, |v| weights(v).d);
    let pe = ctx.site_product(u, e);
    let qr = [
        ratio(q1(-1.0), q1(0.0), u)?,
        ratio(q1(1.0) * q2(-3.0), q1(0.0) * q2(0.0), u)?,
        ratio(q1(1.0) * q2(3.0), q1(3.0) * q2(0.0), u)?,
        ratio(q1(1.0) * q1(4.0), q1(2.0) * q1(3.0), u)?,
        ratio(q1(4.0) * q2(-1.0), q1(2.0) * q2(2.0), u)?,
        ratio(q1(4.0) * q2(5.0), q1(5.0) * q2(2.0), u)?,
        ratio(q1(6.0), q1(5.0), u)?,
    ];
    let sites = [pa, pb, pb, pc, pd, pd, pe];
    match ctx.mode {
        Mode::Periodic => {
            let mut z = [re(0.0); 7];
            for k in 0..7 {
                z[k] = sites[k] * qr[k];
            }
            Ok(ZSet { z, f: [re(0.0); 2] })
        }
        Mode::Open => {
            let pre = [
                (u + 1.0) * (u + 6.0) / ((u + 2.0) * (u + 3.0)) * (u + 0.5) * (u + 2.5),
                u * (u + 6.0) / ((u + 2.0) * (u + 3.0)) * (u + 0.5) * (u + 2.5),
                u * (u + 6.0) / ((u + 2.0) * (u + 3.0)) * (u + 3.5) * (u + 2.5),
                u * (u + 6.0) / ((u + 2.0) * (u + 4.0)) * (u + 3.5) * (u + 2.5),
                u * (u + 6.0) / ((u + 3.0) * (u + 4.0)) * (u + 3.5) * (u + 2.5),
                u * (u + 6.0) / ((u + 3.0) * (u + 4.0)) * (u + 3.5) * (u + 5.5),
                u * (u + 5.0) / ((u + 3.0) * (u + 4.0)) * (u + 3.5) * (u + 5.5),
            ];
            let mut z = [re(0.0); 7];
            for k in 0..7 {
                z[k] = finite(pre[k] * sites[k] * qr[k] * -4.0, u)?;
            }
            let f1 = u * (u + 6.0) / (u + 3.0) * (u + 2.5) * pb * ratio(q1(1.0), q2(0.0), u)? * ctx.x * -4.0;
            let f2 = u * (u + 6.0) / (u + 3.0) * (u + 3.5) * pd * ratio(q1(4.0), q2(2.0), u)? * ctx.x * -4.0;
            Ok(ZSet { z, f: [finite(f1, u)?, finite(f2, u)?] })
        }
    }
}

/// Λ(u).
pub fn lambda_fund(ctx: &TQContext, roots: &BetheRoots, u: C64) -> Result<C64> {
    let s = z_all(ctx, roots, u)?;
    Ok(s.sum(1, 7) + s.f[0] + s.f[1])
}

/// Λ̄(w), from the fusion of Λ(u)Λ(u−1) with u = w + 1/2.
pub fn lambda_bar(ctx: &TQContext, roots: &BetheRoots, w: C64) -> Result<C64> {
    let u = w + 0.5;
    let (s0, s1) = (z_all(ctx, roots, u)?, z_all(ctx, roots, u - 1.0)?);
    let [f1, f2] = s0.f;
    let [g1, g2] = s1.f;
    let body = s0.z[0] * (s1.sum(2, 7) + g1 + g2)
        + (s0.sum(2, 6) + f1 + f2) * s1.z[6]
        + (s0.z[1] + f1 + s0.z[2]) * (s1.z[4] + g2 + s1.z[5]);
    let pre = match ctx.mode {
        Mode::Open => {
            -(u + 2.0) * (u + 3.0) / ((u - 1.0) * (u + 6.0) * (u + 2.5) * (u + 2.5))
                / ctx.thetas.iter().map(|&t| (u + t - 1.0) * (u - t - 1.0) * a(u - t) * a(u + t)).product::<C64>()
        }
        Mode::Periodic => re(1.0) / ctx.thetas.iter().map(|&t| (u - t - 1.0) * a(u - t)).product::<C64>(),
    };
    finite(pre * body, u)
}

/// Which form of the last term of Λ̃ to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TildeForm {
    /// Z₂(u)·Z₃(u−3)·[…]; agrees with exact diagonalization.
    Corrected,
    /// Z₁(u)·Z₃(u−3)·[…] as printed.
    Printed,
}

/// Λ̃(w), with u = w + 5/2.
pub fn lambda_tilde(ctx: &TQContext, roots: &BetheRoots, w: C64) -> Result<C64> {
    lambda_tilde_form(ctx, roots, w, TildeForm::Corrected)
}

pub fn lambda_tilde_form(ctx: &TQContext, roots: &BetheRoots, w: C64, form: TildeForm) -> Result<C64> {
    let u = w + 2.5;
    let (s0, s3, s4) = (z_all(ctx, roots, u)?, z_all(ctx, roots, u - 3.0)?, z_all(ctx, roots, u - 4.0)?);
    let tail = s4.z[4] + s4.f[1] + s4.z[5];
    let last = match form {
        TildeForm::Corrected => s0.z[1] * s3.z[2] * tail,
        TildeForm::Printed => s0.z[0] * s3.z[2] * tail,
    };
    let body = (s0.sum(1, 4) + s0.f[0]) * (s3.sum(1, 6) + s3.f[0] + s3.f[1]) * s4.z[6]
        + s0.z[0] * s3.z[0] * (s4.sum(4, 6) + s4.f[1])
        + s0.z[4] * s3.z[5] * s4.z[6]
        + s0.z[0] * (s3.z[1] + s3.f[0] + s3.z[2]) * tail
        + last;
    let pre = match ctx.mode {
        Mode::Open => {
            u * (u - 1.0) * (u + 4.0) * (u - 1.5) / ((u + 1.0) * (u + 6.0) * (u - 4.0) * (u - 0.5))
                / ctx
                    .thetas
                    .iter()
                    .map(|&t| (u + t - 4.0) * (u - t - 4.0) * (u + t + 6.0) * (u - t + 6.0) * a(u + t - 3.0) * a(u - t - 3.0))
                    .product::<C64>()
        }
        Mode::Periodic => re(1.0) / ctx.thetas.iter().map(|&t| (u - t - 4.0) * (u - t + 6.0) * a(u - t - 3.0)).product::<C64>(),
    };
    finite(pre * body, u)
}

pub fn eigenvalue(ctx: &TQContext, roots: &BetheRoots, kind: Kind, u: C64) -> Result<C64> {
    match kind {
        Kind::Fund => lambda_fund(ctx, roots, u),
        Kind::Bar => lambda_bar(ctx, roots, u),
        Kind::Tilde => lambda_tilde(ctx, roots, u),
    }
}

/// Polynomial sampled at the roots of unity on a disc, stored in the
/// scaled variable t = (u − center)/radius. The discrete Fourier transform
/// of the samples gives the coefficients exactly, and evaluation is well
/// conditioned anywhere inside the disc.
#[derive(Clone, Debug)]
pub struct ScalarPoly {
    center: C64,
    radius: f64,
    coeffs: Vec<C64>,
}

/// The disc used for eigenvalue polynomials. It covers every point the
/// functional relations touch for |θ| ≲ 1.
pub const DISC_CENTER: f64 = -3.0;
pub const DISC_RADIUS: f64 = 7.0;
const DISC_PHASE: f64 = 0.1234;

impl ScalarPoly {
    pub fn nodes(center: C64, radius: f64, degree: usize) -> Vec<C64> {
        let n = degree + 1;
        (0..n)
            .map(|k| center + C64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64 + DISC_PHASE))
            .collect()
    }

    /// Fit from samples at [`ScalarPoly::nodes`].
    pub fn from_samples(center: C64, radius: f64, samples: &[C64]) -> Self {
        let n = samples.len();
        let coeffs = (0..n)
            .map(|m| {
                let s: C64 = samples
                    .iter()
                    .enumerate()
                    .map(|(k, &f)| f * C64::from_polar(1.0, -(std::f64::consts::TAU * (m * k) as f64 / n as f64 + DISC_PHASE * m as f64)))
                    .sum();
                s / n as f64
            })
            .collect();
        Self { center, radius, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, u: C64) -> C64 {
        let t = (u - self.center) / self.radius;
        self.coeffs.iter().rev().fold(re(0.0), |acc, &b| acc * t + b)
    }

    /// Coefficient of u^degree.
    pub fn leading(&self) -> C64 {
        self.coeffs[self.degree()] / self.radius.powi(self.degree() as i32)
    }

    /// Largest sample magnitude, a natural scale for absolute comparisons.
    pub fn scale(&self) -> f64 {
        self.coeffs.iter().map(|b| b.norm()).sum()
    }
}

/// Interpolated eigenvalue with the relative error at a held-out interior
/// point.
pub fn eigenvalue_poly(ctx: &TQContext, roots: &BetheRoots, kind: Kind) -> Result<(ScalarPoly, f64)> {
    let center = re(DISC_CENTER);
    let xs = ScalarPoly::nodes(center, DISC_RADIUS, ctx.degree(kind));
    let ys = xs.iter().map(|&x| eigenvalue(ctx, roots, kind, x)).collect::<Result<Vec<_>>>()?;
    let p = ScalarPoly::from_samples(center, DISC_RADIUS, &ys);
    let h = c(0.61, -0.29);
    let direct = eigenvalue(ctx, roots, kind, h)?;
    Ok((p.clone(), rel(p.eval(h), direct)))
}

/// |a − b| / max(|a|, |b|), zero when both vanish.
pub fn rel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Relative difference with magnitudes below `1e-12·scale` treated as
/// zero, for relations whose two sides may both vanish.
pub fn rel_floor(a: C64, b: C64, scale: f64) -> f64 {
    let s = a.norm().max(b.norm()).max(1e-12 * scale);
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Bethe-equation residuals, each divided by its largest term. The μ¹
/// equations are in zero form (denominators multiplied out); the open-chain
/// μ² equations are LHS + x, since clearing their 1/(iμ) would admit the
/// spurious root μ² = 0. Open: one per μ¹ then one per μ². Periodic:
/// likewise, with the one-sided equations.
pub fn bae_residuals(ctx: &TQContext, roots: &BetheRoots) -> Result<Vec<C64>> {
    roots.check_collisions()?;
    Ok(bae_terms(ctx, roots).into_iter().map(|(s, m)| if m == 0.0 { s } else { s / m }).collect())
}

/// Bethe equations in the printed ratio form, |LHS − RHS| / max(1, |LHS|, |RHS|).
/// Stays small on singular root pairs (μ ≈ ±i/2) where the zero form
/// degenerates to 0 = 0 at leading order.
pub fn bae_residuals_ratio(ctx: &TQContext, roots: &BetheRoots) -> Vec<f64> {
    let scaled = |l: C64, r: C64| (l - r).norm() / 1f64.max(l.norm()).max(r.norm());
    let q1 = |u: C64| q_fn(1, roots, u);
    let q2 = |u: C64| q_fn(2, roots, u);
    let mut out = Vec::new();
    for &m in &roots.mu1 {
        let v = I * m;
        let lhs = q1(v + 0.5) * q2(v - 3.5) / (q1(v - 1.5) * q2(v - 0.5));
        let rhs = match ctx.mode {
            Mode::Open => {
                -(v + 0.5) / (v - 0.5)
                    * ctx.thetas.iter().map(|&t| (v - t + 0.5) * (v + t + 0.5) / ((v - t - 0.5) * (v + t - 0.5))).product::<C64>()
            }
            Mode::Periodic => -ctx.thetas.iter().map(|&t| (v + 0.5 - t) / (v - 0.5 - t)).product::<C64>(),
        };
        out.push(scaled(lhs, rhs));
    }
    for &m in &roots.mu2 {
        let v = I * m;
        out.push(match ctx.mode {
            Mode::Open => scaled((v - 1.5) / v * q2(v - 5.0) / q1(v - 2.0) + (v + 1.5) / v * q2(v + 1.0) / q1(v + 1.0), -ctx.x),
            Mode::Periodic => scaled(q1(v - 2.0) * q2(v + 1.0) / (q1(v + 1.0) * q2(v - 5.0)), re(-1.0)),
        });
    }
    out
}

/// Indices of μ¹ roots in a pair pinned at ±i/2. On the open chain such a
/// pair is a double root at a zero of the Q¹ shifts, and its own Bethe
/// equations reduce to 0·∞.
pub fn singular_indices(roots: &BetheRoots) -> Vec<usize> {
    let near = |z: C64| (z - I * 0.5).norm() < 1e-4 || (z + I * 0.5).norm() < 1e-4;
    let hits: Vec<usize> = (0..roots.mu1.len()).filter(|&k| near(roots.mu1[k])).collect();
    if hits.len() >= 2 {
        hits
    } else {
        vec![]
    }
}

pub fn has_singular_pair(roots: &BetheRoots) -> bool {
    !singular_indices(roots).is_empty()
}

/// (sum of terms, largest term magnitude) per equation.
/// Terms of each Bethe equation; each equation reads "terms sum to zero".
fn bae_raw(ctx: &TQContext, roots: &BetheRoots) -> Vec<Vec<C64>> {
    let q1 = |u: C64| q_fn(1, roots, u);
    let q2 = |u: C64| q_fn(2, roots, u);
    let pack = |ts: &[C64]| ts.to_vec();
    let mut out = Vec::with_capacity(roots.mu1.len() + roots.mu2.len());
    for &m in &roots.mu1 {
        let v = I * m;
        let ts = match ctx.mode {
            Mode::Open => {
                let pm: C64 = ctx.thetas.iter().map(|&t| (v - t - 0.5) * (v + t - 0.5)).product();
                let pp: C64 = ctx.thetas.iter().map(|&t| (v - t + 0.5) * (v + t + 0.5)).product();
                [q1(v + 0.5) * q2(v - 3.5) * (v - 0.5) * pm, (v + 0.5) * pp * q1(v - 1.5) * q2(v - 0.5)]
            }
            Mode::Periodic => {
                let pm: C64 = ctx.thetas.iter().map(|&t| v - 0.5 - t).product();
                let pp: C64 = ctx.thetas.iter().map(|&t| v + 0.5 - t).product();
                [q1(v + 0.5) * q2(v - 3.5) * pm, pp * q1(v - 1.5) * q2(v - 0.5)]
            }
        };
        out.push(pack(&ts));
    }
    for &m in &roots.mu2 {
        let v = I * m;
        match ctx.mode {
            Mode::Open => {
                let ts = [(v - 1.5) / v * q2(v - 5.0) / q1(v - 2.0), (v + 1.5) / v * q2(v + 1.0) / q1(v + 1.0), ctx.x];
                out.push(pack(&ts));
            }
            Mode::Periodic => out.push(pack(&[q1(v - 2.0) * q2(v + 1.0), q1(v + 1.0) * q2(v - 5.0)])),
        }
    }
    out
}

fn bae_terms(ctx: &TQContext, roots: &BetheRoots) -> Vec<(C64, f64)> {
    bae_raw(ctx, roots)
        .iter()
        .map(|ts| (ts.iter().sum::<C64>(), ts.iter().map(|t| t.norm()).fold(0.0, f64::max)))
        .collect()
}

/// Ratio form used as the Newton system: −(other terms)/(last term) − 1.
/// Analytic away from poles and free of the scale of the zero form, which
/// flattens out far from a solution.
fn newton_system(ctx: &TQContext, roots: &BetheRoots) -> Vec<C64> {
    bae_raw(ctx, roots)
        .into_iter()
        .map(|mut ts| {
            if ts.len() > 2 && ts[ts.len() - 1].norm() == 0.0 {
                ts.pop();
            }
            let last = ts.pop().expect("equation has terms");
            -ts.iter().sum::<C64>() / last - 1.0
        })
        .collect()
}

fn l2(r: &[C64]) -> f64 {
    let n = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n.is_finite() { n } else { f64::INFINITY }
}

fn inf_norm(r: &[C64]) -> f64 {
    r.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn normalized_norm(ctx: &TQContext, roots: &BetheRoots) -> f64 {
    let t = bae_terms(ctx, roots);
    let r: Vec<C64> = t.iter().map(|&(s, m)| s / m).collect();
    let n = inf_norm(&r);
    if n.is_finite() {
        n
    } else {
        f64::INFINITY
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_iter: usize,
    /// Stop iterating below this ∞-norm.
    pub tol: f64,
    /// Accept a solution below this ∞-norm.
    pub accept: f64,
    pub max_halvings: usize,
    pub random_starts: usize,
    pub rng_seed: u64,
    /// Random start components: real part in ±re_range, imaginary in ±im_range.
    pub re_range: f64,
    pub im_range: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_iter: 100,
            tol: 1e-11,
            accept: 1e-9,
            max_halvings: 20,
            random_starts: 200,
            rng_seed: 7,
            re_range: 3.0,
            im_range: 3.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub roots: BetheRoots,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solutions: Vec<Solution>,
    pub attempts: usize,
    /// Smallest residual reached by any start, converged or not.
    pub best_residual: f64,
}

/// Damped Newton on the scaled zero-form residuals, with a forward
/// difference Jacobian (the residuals are analytic in the roots).
pub fn newton(ctx: &TQContext, start: &BetheRoots, opts: &SolveOptions) -> Solution {
    let mut z = start.flat();
    let n = z.len();
    let mut cur = start.clone();
    let mut norm = normalized_norm(ctx, &cur);
    let mut merit = l2(&newton_system(ctx, &cur));
    let mut it = 0;
    while it < opts.max_iter && norm > opts.tol && n > 0 && merit.is_finite() {
        it += 1;
        let f0 = Array1::from(newton_system(ctx, &cur));
        let mut jac = Array2::<C64>::zeros((n, n));
        for k in 0..n {
            let h = 1e-7 * z[k].norm().max(1.0);
            let mut zp = z.clone();
            zp[k] += h;
            let fp = newton_system(ctx, &cur.with_flat(&zp));
            for (r, v) in fp.iter().enumerate() {
                jac[[r, k]] = (v - f0[r]) / h;
            }
        }
        let Ok(step) = jac.solve_into(f0) else { break };
        if !step.iter().all(|s| s.is_finite()) {
            break;
        }
        let mut lam = 1.0;
        let mut moved = false;
        for _ in 0..=opts.max_halvings {
            let trial: Vec<C64> = z.iter().zip(step.iter()).map(|(&zi, &si)| zi - si * lam).collect();
            let tr = cur.with_flat(&trial);
            let tm = l2(&newton_system(ctx, &tr));
            if tm < merit {
                z = trial;
                norm = normalized_norm(ctx, &tr);
                cur = tr;
                merit = tm;
                moved = true;
                break;
            }
            lam *= 0.5;
        }
        if !moved {
            break;
        }
    }
    Solution { roots: cur, residual: norm, iterations: it }
}

/// Smallest linear factor of a Q-function at u.
fn q_min_factor(which: u8, roots: &BetheRoots, u: C64) -> f64 {
    let (set, shift) = if which == 1 { (&roots.mu1, I * 0.5) } else { (&roots.mu2, I * 2.0) };
    let iu = I * u + shift;
    set.iter()
        .map(|&m| match roots.mode {
            Mode::Open => (iu + m).norm().min((iu - m).norm()),
            Mode::Periodic => (iu + m).norm(),
        })
        .fold(f64::INFINITY, f64::min)
}

/// Distance of the roots from the zeros of the printed Bethe-equation
/// denominators. Zero-form solutions sitting on such a zero are artifacts
/// of clearing the denominators.
pub fn denominator_clearance(ctx: &TQContext, roots: &BetheRoots) -> f64 {
    let mut d = f64::INFINITY;
    for &m in &roots.mu1 {
        let v = I * m;
        d = d.min(q_min_factor(1, roots, v - 1.5)).min(q_min_factor(2, roots, v - 0.5));
        for &t in &ctx.thetas {
            d = d.min((v - t - 0.5).norm());
            if ctx.mode == Mode::Open {
                d = d.min((v + t - 0.5).norm());
            }
        }
        if ctx.mode == Mode::Open {
            d = d.min((v - 0.5).norm());
        }
    }
    for &m in &roots.mu2 {
        let v = I * m;
        d = match ctx.mode {
            Mode::Open => d.min(v.norm()).min(q_min_factor(1, roots, v - 2.0)).min(q_min_factor(1, roots, v + 1.0)),
            Mode::Periodic => d.min(q_min_factor(1, roots, v + 1.0)).min(q_min_factor(2, roots, v - 5.0)),
        };
    }
    d
}

fn plausible(ctx: &TQContext, s: &Solution, opts: &SolveOptions) -> bool {
    s.residual < opts.accept
        && denominator_clearance(ctx, &s.roots) > 1e-5
        && s.roots.flat().iter().all(|z| z.is_finite() && z.norm() < 100.0)
        && s.roots.check_collisions().is_ok()
        && lambda_fund(ctx, &s.roots, c(0.37, 0.21)).is_ok()
}

/// Random starts with the given root counts.
pub fn random_starts(mode: Mode, l1: usize, l2: usize, opts: &SolveOptions) -> Vec<BetheRoots> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    // Every other start hugs the imaginary axis, where most roots of the
    // real-boundary chains sit.
    let mut draw = |k: usize, axis: bool| -> Vec<C64> {
        let re_range = if axis { 0.05 } else { opts.re_range };
        (0..k).map(|_| c(rng.random_range(-re_range..re_range), rng.random_range(-opts.im_range..opts.im_range))).collect()
    };
    (0..opts.random_starts).map(|k| BetheRoots { mu1: draw(l1, k % 2 == 1), mu2: draw(l2, k % 2 == 1), mode }).collect()
}

/// Multistart Newton from the given seeds followed by random starts;
/// returns distinct converged solutions. On the open chain L2 = L1.
pub fn solve_bae(ctx: &TQContext, l1: usize, l2: usize, seeds: &[BetheRoots], opts: &SolveOptions) -> Result<SolveOutcome> {
    if ctx.mode == Mode::Open && l1 != l2 {
        return Err(Error::Config(format!("open chain needs L2 = L1, got {l1} and {l2}")));
    }
    if let Some(bad) = seeds.iter().find(|s| s.mu1.len() != l1 || s.mu2.len() != l2) {
        return Err(Error::Config(format!("seed has ({}, {}) roots, expected ({l1}, {l2})", bad.mu1.len(), bad.mu2.len())));
    }
    if l1 == 0 && l2 == 0 {
        let roots = BetheRoots::empty(ctx.mode);
        return Ok(SolveOutcome { solutions: vec![Solution { roots, residual: 0.0, iterations: 0 }], attempts: 1, best_residual: 0.0 });
    }
    let mut starts: Vec<BetheRoots> = seeds.to_vec();
    starts.extend(random_starts(ctx.mode, l1, l2, opts));
    let runs: Vec<Solution> = starts.par_iter().map(|s| newton(ctx, s, opts)).collect();
    let best_residual = runs.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min);
    let mut solutions: Vec<Solution> = Vec::new();
    for s in runs {
        if plausible(ctx, &s, opts) && !solutions.iter().any(|t| t.roots.same_as(&s.roots, 1e-6)) {
            solutions.push(Solution { roots: s.roots.canonical(), ..s });
        }
    }
    Ok(SolveOutcome { solutions, attempts: starts.len(), best_residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchEntry {
    pub solution: usize,
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub lambda: C64,
    pub level: usize,
    pub rel_err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MatchReport {
    pub entries: Vec<MatchEntry>,
    pub covered: Vec<bool>,
    pub coverage: f64,
}

/// Match Λ(u₀) of each solution to the nearest distinct ED level.
pub fn match_spectrum(ctx: &TQContext, solutions: &[BetheRoots], levels: &[C64], u0: C64, tol: f64) -> Result<MatchReport> {
    let mut covered = vec![false; levels.len()];
    let mut entries = Vec::new();
    for (i, r) in solutions.iter().enumerate() {
        let l = lambda_fund(ctx, r, u0)?;
        let (level, err) = levels
            .iter()
            .enumerate()
            .map(|(k, &v)| (k, rel(l, v)))
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap_or((usize::MAX, f64::INFINITY));
        if err <= tol {
            covered[level] = true;
        }
        entries.push(MatchEntry { solution: i, lambda: l, level, rel_err: err });
    }
    let coverage = if levels.is_empty() { 1.0 } else { covered.iter().filter(|&&c| c).count() as f64 / levels.len() as f64 };
    Ok(MatchReport { entries, covered, coverage })
}

struct Polys {
    fund: ScalarPoly,
    bar: ScalarPoly,
    tilde: ScalarPoly,
}

/// Eigenvalue from the T-Q expression, with removable poles filled in by
/// the mean over a small circle (exact for polynomials of degree < 32).
fn regular_value(ctx: &TQContext, roots: &BetheRoots, kind: Kind, u: C64) -> Option<C64> {
    let direct = |u| eigenvalue(ctx, roots, kind, u).ok().filter(|v: &C64| v.is_finite());
    direct(u).or_else(|| {
        let n = 32;
        let vals: Option<Vec<C64>> = (0..n).map(|k| direct(u + C64::from_polar(0.1, std::f64::consts::TAU * k as f64 / n as f64 + DISC_PHASE))).collect();
        vals.map(|v| v.iter().sum::<C64>() / n as f64)
    })
}

fn polys(ctx: &TQContext, roots: &BetheRoots, rep: &mut Report, tol: f64) -> Result<Polys> {
    let mut out = Vec::new();
    for (kind, lead) in Kind::ALL.into_iter().zip(ctx.leading()) {
        let (p, held) = eigenvalue_poly(ctx, roots, kind)?;
        rep.push(format!("{kind:?} eigenvalue is a polynomial of degree {}", ctx.degree(kind)), held, tol);
        rep.push(format!("{kind:?} eigenvalue leading coefficient"), rel(p.leading(), lead), tol);
        out.push(p);
    }
    let tilde = out.pop().expect("three kinds");
    let bar = out.pop().expect("three kinds");
    let fund = out.pop().expect("three kinds");
    Ok(Polys { fund, bar, tilde })
}

/// Functional relations of the open-chain eigenvalues on one root set:
/// crossing, the product relations at ±θ_j, the special points,
/// polynomiality and asymptotics.
pub fn open_relations(ctx: &TQContext, roots: &BetheRoots, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let p = polys(ctx, roots, &mut rep, tol)?;
    let th = ctx.thetas.clone();
    let prod = |f: &dyn Fn(C64) -> C64| th.iter().map(|&t| f(t)).product::<C64>();
    let at = |kind, poly: &ScalarPoly, u| regular_value(ctx, roots, kind, u).unwrap_or_else(|| poly.eval(u));
    let (l, lb, lt) = (|u| at(Kind::Fund, &p.fund, u), |u| at(Kind::Bar, &p.bar, u), |u| at(Kind::Tilde, &p.tilde, u));
    let (sl, sb, st) = (p.fund.scale(), p.bar.scale(), p.tilde.scale());

    for u in [c(0.37, 0.21), c(-1.3, 0.45)] {
        rep.push("crossing of Λ", rel(lambda_fund(ctx, roots, u)?, lambda_fund(ctx, roots, -u - 6.0)?), tol);
        rep.push("crossing of Λ̄", rel(lambda_bar(ctx, roots, u)?, lambda_bar(ctx, roots, -u - 6.0)?), tol);
        rep.push("crossing of Λ̃", rel(lambda_tilde(ctx, roots, u)?, lambda_tilde(ctx, roots, -u - 6.0)?), tol);
    }

    for (j, &tj) in th.iter().enumerate() {
        for s in [1.0, -1.0] {
            let x = tj * s;
            let tag = format!("{}θ{}", if s > 0.0 { "+" } else { "-" }, j + 1);
            if s > 0.0 {
                let k = re(16.0) * (x - 1.0) * (x - 6.0) * (x + 1.0) * (x + 6.0) / ((x - 2.0) * (x - 3.0) * (x + 2.0) * (x + 3.0))
                    * (x - 0.5) * (x - 2.5) * (x + 0.5) * (x + 2.5)
                    * prod(&|t| rho(x - t) * rho(x + t));
                rep.push(format!("Λ(x)Λ(x-6) [{tag}]"), rel_floor(l(x) * l(x - 6.0), k, sl * sl), tol);
            }
            let k = -(x - 1.0) * (x + 6.0) * (x + 2.5) * (x + 2.5) / ((x + 2.0) * (x + 3.0))
                * prod(&|t| (x - t - 1.0) * (x + t - 1.0) * a(x - t) * a(x + t));
            rep.push(format!("Λ(x)Λ(x-1) ∝ Λ̄(x-1/2) [{tag}]"), rel_floor(l(x) * l(x - 1.0), k * lb(x - 0.5), sl * sl), tol);
            let k = -(x + 1.0) * (x + 6.0) / ((x - 0.5) * (x - 1.5) * (x + 3.0) * (x + 4.0)) * prod(&|t| (x - t + 6.0) * (x + t + 6.0));
            rep.push(format!("Λ(x)Λ̄(x-7/2) ∝ Λ̃(x-5/2) [{tag}]"), rel_floor(l(x) * lb(x - 3.5), k * lt(x - 2.5), sl * sb), tol);
            let k = re(16.0) * (x + 1.0) * (x + 6.0) / ((x + 3.0) * (x + 4.0)) * (x - 0.5) * (x - 3.5) * (x + 0.5) * (x + 2.5)
                * prod(&|t| (x - t + 6.0) * (x + t + 6.0));
            rep.push(format!("Λ(x)Λ̃(x-9/2) ∝ Λ(x-2)Λ(x-5) [{tag}]"), rel_floor(l(x) * lt(x - 4.5), k * l(x - 2.0) * l(x - 5.0), sl * st), tol);
            let base = re(-64.0) * (x - 4.0) * (x + 1.0) * (x + 6.0) / ((x - 2.0) * (x + 2.0) * (x + 3.0))
                * (x - 5.5) * (x - 2.5) * (x - 1.5) * (x - 0.5) * (x + 0.5) * (x + 2.5);
            let lhs = l(x) * lt(x - 6.5);
            let printed = base * prod(&|t| (x - t + 4.0) * (x + t + 4.0) * a(x - t) * a(x + t));
            let corrected = base * prod(&|t| (x - t - 4.0) * (x + t - 4.0) * a(x - t) * a(x + t));
            rep.push_erratum(format!("Λ(x)Λ̃(x-13/2) ∝ Λ(x-7), printed [{tag}]"), rel_floor(lhs, printed * l(x - 7.0), sl * st), tol, "per-site factor printed with +4 shifts");
            rep.push(format!("Λ(x)Λ̃(x-13/2) ∝ Λ(x-7) [{tag}]"), rel_floor(lhs, corrected * l(x - 7.0), sl * st), tol);
        }
    }

    rep.push("Λ(0) = -5Πρ(θ)", rel_floor(l(re(0.0)), prod(&|t| rho(t)) * -5.0, sl), tol);
    rep.push("Λ(-1) ∝ Λ̄(-1/2)", rel_floor(l(re(-1.0)), prod(&|t| (t - 1.0) * (-t - 1.0)) * -1.25 * lb(re(-0.5)), sl), tol);
    let k = prod(&|t| (t + 1.0) * (-t + 1.0) * (t + 4.0) * (-t + 4.0)) * 7.5;
    rep.push_erratum("Λ̃(-5/2) ∝ Λ̄(-7/2), printed", rel_floor(lt(re(-2.5)), -k * lb(re(-3.5)), st), tol, "overall sign");
    rep.push("Λ̃(-5/2) ∝ Λ̄(-7/2)", rel_floor(lt(re(-2.5)), k * lb(re(-3.5)), st), tol);
    rep.push("Λ̃(-13/2) ∝ Λ(-7)", rel_floor(lt(re(-6.5)), prod(&|t| (t - 4.0) * (-t - 4.0)) * 330.0 * l(re(-7.0)), st), tol);
    rep.push("Λ̃(-1) = 0", lt(re(-1.0)).norm() / st, tol);
    Ok(rep)
}

/// Product relations of the periodic eigenvalues at u = θ_j, plus
/// polynomiality and the 7, 15, 34 leading coefficients.
pub fn periodic_relations(ctx: &TQContext, roots: &BetheRoots, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let p = polys(ctx, roots, &mut rep, tol)?;
    let th = ctx.thetas.clone();
    let at = |kind, poly: &ScalarPoly, u| regular_value(ctx, roots, kind, u).unwrap_or_else(|| poly.eval(u));
    let (l, lb, lt) = (|u| at(Kind::Fund, &p.fund, u), |u| at(Kind::Bar, &p.bar, u), |u| at(Kind::Tilde, &p.tilde, u));
    let (sl, sb, st) = (p.fund.scale(), p.bar.scale(), p.tilde.scale());
    for (j, &x) in th.iter().enumerate() {
        let tag = format!("θ{}", j + 1);
        let pr = |f: &dyn Fn(C64) -> C64| th.iter().map(|&t| f(x - t)).product::<C64>();
        rep.push(format!("Λp(x)Λp(x-6) [{tag}]"), rel_floor(l(x) * l(x - 6.0), pr(&|d| a(d) * e(d - 6.0)), sl * sl), tol);
        rep.push_erratum(
            format!("Λp(x)Λp(x-4) ∝ Λp(x-2), printed [{tag}]"),
            rel_floor(l(x) * l(x - 4.0), pr(&|d| (d + 1.0) * (d - 4.0) * (d - 6.0)) * l(x - 2.0), sl * sl),
            tol,
            "per-site factor (d-6) should be (d+6)",
        );
        rep.push(format!("Λp(x)Λp(x-4) ∝ Λp(x-2) [{tag}]"), rel_floor(l(x) * l(x - 4.0), pr(&|d| (d + 1.0) * (d - 4.0) * (d + 6.0)) * l(x - 2.0), sl * sl), tol);
        rep.push(format!("Λp(x)Λp(x-1) ∝ Λ̄p(x-1/2) [{tag}]"), rel_floor(l(x) * l(x - 1.0), pr(&|d| (d - 1.0) * a(d)) * lb(x - 0.5), sl * sl), tol);
        rep.push(format!("Λp(x)Λ̄p(x-11/2) ∝ Λp(x-5) [{tag}]"), rel_floor(l(x) * lb(x - 5.5), pr(&|d| (d + 4.0) * (d + 6.0)) * l(x - 5.0), sl * sb), tol);
        rep.push(format!("Λp(x)Λ̄p(x-7/2) ∝ Λ̃p(x-5/2) [{tag}]"), rel_floor(l(x) * lb(x - 3.5), pr(&|d| d + 6.0) * lt(x - 2.5), sl * sb), tol);
        rep.push(
            format!("Λp(x)Λ̃p(x-7/2) ∝ Λ̄p(x-5/2) [{tag}]"),
            rel_floor(l(x) * lt(x - 3.5), pr(&|d| (d - 1.0) * (d - 4.0) * a(d)) * lb(x - 2.5), sl * st),
            tol,
        );
        rep.push(format!("Λp(x)Λ̃p(x-9/2) ∝ Λp(x-2)Λp(x-5) [{tag}]"), rel_floor(l(x) * lt(x - 4.5), pr(&|d| d + 6.0) * l(x - 2.0) * l(x - 5.0), sl * st), tol);
        rep.push(format!("Λp(x)Λ̃p(x-13/2) ∝ Λp(x-7) [{tag}]"), rel_floor(l(x) * lt(x - 6.5), pr(&|d| (d - 4.0) * a(d)) * l(x - 7.0), sl * st), tol);
        let (lhs, rhs) = (l(x) * lt(x - 1.5), l(x - 2.0) * lb(x - 0.5));
        rep.push_erratum(
            format!("Λp(x)Λ̃p(x-3/2) ∝ Λp(x-2)Λ̄p(x-1/2), printed [{tag}]"),
            rel_floor(lhs, pr(&|d| (d - 1.0) * (d - 6.0)) * rhs, sl * st),
            tol,
            "per-site factor (d-1)(d-6) should be (d+1)(d+6)",
        );
        rep.push(format!("Λp(x)Λ̃p(x-3/2) ∝ Λp(x-2)Λ̄p(x-1/2) [{tag}]"), rel_floor(lhs, pr(&|d| (d + 1.0) * (d + 6.0)) * rhs, sl * st), tol);
    }
    Ok(rep)
}

/// All relations appropriate to the context's boundary.
pub fn relations(ctx: &TQContext, roots: &BetheRoots, tol: f64) -> Result<Report> {
    match ctx.mode {
        Mode::Open => open_relations(ctx, roots, tol),
        Mode::Periodic => periodic_relations(ctx, roots, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_ctx() -> TQContext {
        TQContext::open(vec![re(0.0)], &BoundaryParams::table())
    }

    #[test]
    fn q_functions_of_a_zero_root() {
        // μ = 0 is not a valid open-chain root, but Q is still defined
        assert!(BetheRoots::new(vec![re(0.0)], vec![re(0.0)], Mode::Open).is_err());
        let r = BetheRoots { mu1: vec![re(0.0)], mu2: vec![re(0.0)], mode: Mode::Open };
        let u = c(0.3, -0.7);
        assert!((q_fn(1, &r, u) + (u + 0.5) * (u + 0.5)).norm() < 1e-14);
        assert!((q_fn(2, &r, u) + (u + 2.0) * (u + 2.0)).norm() < 1e-14);
        assert_eq!(q_fn(1, &BetheRoots::empty(Mode::Open), u), re(1.0));
    }

    #[test]
    fn z1_at_zero_for_empty_roots() {
        let s = z_all(&table_ctx(), &BetheRoots::empty(Mode::Open), re(0.0)).unwrap();
        assert!((s.z[0] - (-2880.0)).norm() < 1e-10);
        assert!(s.z[1..].iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn f_terms_vanish_in_the_diagonal_limit() {
        let ctx = TQContext::open(vec![re(0.2)], &BoundaryParams::diagonal());
        assert_eq!(ctx.x, re(0.0));
        let r = BetheRoots::new(vec![c(0.3, 0.1)], vec![c(-0.4, 0.9)], Mode::Open).unwrap();
        let s = z_all(&ctx, &r, c(0.7, 0.2)).unwrap();
        assert_eq!(s.f, [re(0.0); 2]);
    }

    #[test]
    fn pole_is_flagged() {
        let r = BetheRoots::new(vec![c(0.3, 0.0)], vec![c(0.9, 0.0)], Mode::Open).unwrap();
        // Q¹(u + 5) vanishes at u = iμ − 11/2
        let u = I * 0.3 - 5.5;
        assert!(matches!(z_all(&table_ctx(), &r, u), Err(Error::Pole(_))));
    }

    #[test]
    fn collision_is_rejected() {
        let e = BetheRoots::new(vec![c(0.5, 0.2), c(-0.5, -0.2)], vec![re(1.0), re(2.0)], Mode::Open);
        assert!(matches!(e, Err(Error::RootCollision(..))));
    }

    #[test]
    fn periodic_empty_roots() {
        let ctx = TQContext::periodic(vec![re(0.0)]);
        let r = BetheRoots::empty(Mode::Periodic);
        assert!((lambda_fund(&ctx, &r, re(0.0)).unwrap() - 24.0).norm() < 1e-12);
        let (p, held) = eigenvalue_poly(&ctx, &r, Kind::Fund).unwrap();
        assert!(held < 1e-12);
        assert!((p.leading() - 7.0).norm() < 1e-9);
    }

    #[test]
    fn scalar_poly_recovers_cubic() {
        let f = |u: C64| u * u * u * 2.0 - u + 3.0;
        let xs = ScalarPoly::nodes(re(-3.0), 7.0, 3);
        let p = ScalarPoly::from_samples(re(-3.0), 7.0, &xs.iter().map(|&x| f(x)).collect::<Vec<_>>());
        assert!((p.leading() - 2.0).norm() < 1e-12);
        assert!((p.eval(c(1.7, -2.0)) - f(c(1.7, -2.0))).norm() < 1e-10);
    }

    #[test]
    fn canonical_form_identifies_sign_and_order() {
        let a = BetheRoots { mu1: vec![c(-1.0, 0.5), c(0.0, -2.0)], mu2: vec![c(0.3, 0.0), c(0.1, 0.1)], mode: Mode::Open };
        let b = BetheRoots { mu1: vec![c(0.0, 2.0), c(1.0, -0.5)], mu2: vec![c(-0.1, -0.1), c(-0.3, 0.0)], mode: Mode::Open };
        assert!(a.same_as(&b, 1e-12));
    }
}
