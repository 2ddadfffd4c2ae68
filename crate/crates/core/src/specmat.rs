//! Dense complex matrix substrate: tensor products, partial traces and
//! transposes over one factor, polynomial-coefficient recovery, numeric rank
//! and the normalized residual used by every identity check.

use std::f64::consts::PI;

use ndarray::{s, Array2, Array4, ArrayView2};
use ndarray_linalg::{EigVals, Inverse, SVD};

use crate::error::{Error, Result};
use crate::C64;

pub type Mat = Array2<C64>;


#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn eye(n: usize) -> Mat {
    Array2::eye(n)
}

pub fn zeros(n: usize) -> Mat {
    Array2::zeros((n, n))
}

pub fn frob(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ‖a−b‖_F / max(1, ‖a‖_F, ‖b‖_F).
pub fn residual(a: &Mat, b: &Mat) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension(format!("{:?} vs {:?}", a.dim(), b.dim())));
    }
    let diff = (a - b).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(diff / 1f64.max(frob(a)).max(frob(b)))
}

/// Residual for callers that built both sides with matching shapes.
pub fn res(a: &Mat, b: &Mat) -> f64 {
    residual(a, b).expect("shape mismatch in identity check")
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let x = a[[i, j]];
            if x == C64::new(0.0, 0.0) {
                continue;
            }
            let mut blk = out.slice_mut(s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            blk.zip_mut_with(b, |o, &y| *o = x * y);
        }
    }
    out
}

fn check_shape(m: &Mat, shape: &[usize], which: usize) -> Result<()> {
    let n: usize = shape.iter().product();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::Dimension(format!(
            "matrix {:?} does not match factor dims {:?}",
            m.dim(),
            shape
        )));
    }
    if which >= shape.len() {
        return Err(Error::Dimension(format!("factor {which} out of range for {shape:?}")));
    }
    Ok(())
}

/// Split a flat index into (slow, factor, fast) parts for factor `which`.
fn split_dims(shape: &[usize], which: usize) -> (usize, usize, usize) {
    let pre: usize = shape[..which].iter().product();
    let post: usize = shape[which + 1..].iter().product();
    (pre, shape[which], post)
}

pub fn partial_trace(m: &Mat, shape: &[usize], which: usize) -> Result<Mat> {
    check_shape(m, shape, which)?;
    let (pre, d, post) = split_dims(shape, which);
    let n = pre * post;
    let mut out = Array2::zeros((n, n));
    for a in 0..pre {
        for b in 0..pre {
            for k in 0..d {
                for i in 0..post {
                    let row = (a * d + k) * post + i;
                    for j in 0..post {
                        out[[a * post + i, b * post + j]] += m[[row, (b * d + k) * post + j]];
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn partial_transpose(m: &Mat, shape: &[usize], which: usize) -> Result<Mat> {
    check_shape(m, shape, which)?;
    let (pre, d, post) = split_dims(shape, which);
    let mut out = m.clone();
    for a in 0..pre {
        for k in 0..d {
            for i in 0..post {
                let row = (a * d + k) * post + i;
                for b in 0..pre {
                    for l in 0..d {
                        for j in 0..post {
                            let col = (b * d + l) * post + j;
                            out[[(a * d + l) * post + i, (b * d + k) * post + j]] = m[[row, col]];
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Swap operator mapping `d1 ⊗ d2` to `d2 ⊗ d1`: |i j⟩ ↦ |j i⟩.
pub fn swap(d1: usize, d2: usize) -> Mat {
    let mut p = Array2::zeros((d1 * d2, d1 * d2));
    for i in 0..d1 {
        for j in 0..d2 {
            p[[j * d1 + i, i * d2 + j]] = re(1.0);
        }
    }
    p
}

/// Embed an operator on factors (1,3) of `d1 ⊗ d2 ⊗ d3` given as a matrix
/// on `d1 ⊗ d3`.
pub fn embed_13(m: &Mat, d1: usize, d2: usize, d3: usize) -> Mat {
    let n = d1 * d2 * d3;
    let mut out = Array2::zeros((n, n));
    for a in 0..d1 {
        for i in 0..d3 {
            for b in 0..d1 {
                for j in 0..d3 {
                    let x = m[[a * d3 + i, b * d3 + j]];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..d2 {
                        out[[(a * d2 + k) * d3 + i, (b * d2 + k) * d3 + j]] = x;
                    }
                }
            }
        }
    }
    out
}

pub fn adjoint(m: &Mat) -> Mat {
    m.t().mapv(|z| z.conj())
}

pub fn inv(m: &Mat) -> Result<Mat> {
    Ok(m.inv()?)
}

pub fn eigvals(m: &Mat) -> Result<Vec<C64>> {
    Ok(m.eigvals()?.to_vec())
}

pub fn singular_values(m: &Mat) -> Result<Vec<f64>> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s.to_vec())
}

/// Number of singular values above `tol · σ_max`.
pub fn numeric_rank(m: &Mat, tol: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let top = s.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&x| x > tol * top).count())
}

/// Greedy matching distance between two spectra, normalized by the largest
/// magnitude. Used for identities that only hold up to similarity.
pub fn spectrum_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut pool: Vec<C64> = b.to_vec();
    let mut worst = 0f64;
    for x in a {
        let (k, d) = pool
            .iter()
            .enumerate()
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((0, f64::INFINITY), |acc, p| if p.1 < acc.1 { p } else { acc });
        worst = worst.max(d);
        pool.swap_remove(k);
    }
    let scale = a.iter().chain(b).map(|z| z.norm()).fold(1.0, f64::max);
    worst / scale
}

/// Orthonormal basis of a fused subspace.
#[derive(Clone, Debug)]
pub struct Projector {
    pub basis: Mat,
}

impl Projector {
    /// Column space of a rank-deficient matrix via SVD.
    pub fn from_column_space(m: &Mat, tol: f64) -> Result<Self> {
        let (u, s, _) = m.svd(true, false)?;
        let u = u.ok_or_else(|| Error::Linalg("svd returned no U".into()))?;
        let top = s[0];
        let rank = s.iter().filter(|&&x| x > tol * top).count();
        if rank == m.nrows() {
            return Err(Error::NotDegenerate { rank, dim: m.nrows() });
        }
        Ok(Projector { basis: u.slice(s![.., ..rank]).to_owned() })
    }

    pub fn from_basis(basis: Mat) -> Self {
        Projector { basis }
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// P = B·B†.
    pub fn matrix(&self) -> Mat {
        self.basis.dot(&adjoint(&self.basis))
    }

    pub fn adjoint_basis(&self) -> Mat {
        adjoint(&self.basis)
    }

    /// Largest distance of a vector set from this subspace.
    pub fn distance_of(&self, v: ArrayView2<C64>) -> f64 {
        let p = self.matrix();
        let r = &v - &p.dot(&v);
        (0..v.ncols())
            .map(|j| r.column(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// Sampling segment of a matrix polynomial: center ± half-width, covering
/// [−10, 4] around the crossing point −3. The center is shifted off −3 so
/// no Chebyshev node lands on the integer and half-integer zeros of the
/// fused prefactors.
pub const SEGMENT: (f64, f64) = (-3.0 + 0.1234, 7.0);

/// `count` Chebyshev points of the first kind on the segment.
pub fn chebyshev_nodes(count: usize) -> Vec<C64> {
    let (c0, r) = SEGMENT;
    (0..count).map(|k| re(c0 + r * (PI * (k as f64 + 0.5) / count as f64).cos())).collect()
}

/// Chebyshev coefficients of the polynomial sampled at [`chebyshev_nodes`].
/// Exact for degree below the number of samples.
fn chebyshev_coeffs(vals: &[Mat]) -> Vec<Mat> {
    let n = vals.len();
    (0..n)
        .map(|j| {
            let mut acc = Array2::zeros(vals[0].dim());
            let w = if j == 0 { 1.0 } else { 2.0 } / n as f64;
            for (k, v) in vals.iter().enumerate() {
                acc.scaled_add(re(w * (PI * j as f64 * (k as f64 + 0.5) / n as f64).cos()), v);
            }
            acc
        })
        .collect()
}

/// Matrix polynomial in the spectral parameter with a declared degree bound,
/// stored as a Chebyshev series in t = (u − center)/half-width.
#[derive(Clone, Debug)]
pub struct SpectralMatrix {
    /// Chebyshev coefficients, lowest first.
    pub coeffs: Vec<Mat>,
    /// Tensor-factor dimensions of the space the matrix acts on.
    pub shape: Vec<usize>,
}

impl SpectralMatrix {
    /// Sample `f` at Chebyshev nodes and verify the bound from the two
    /// coefficients above it.
    pub fn from_fn<F>(f: F, degree: usize, shape: Vec<usize>) -> Result<Self>
    where
        F: Fn(C64) -> Mat + Sync,
    {
        let (coeffs, excess) = sample_coeffs(&f, degree);
        if excess > 1e-6 {
            return Err(Error::DegreeBound { degree, residual: excess });
        }
        let m = SpectralMatrix { coeffs, shape };
        if m.dim() != m.coeffs[0].nrows() {
            return Err(Error::Dimension(format!("shape {:?} vs matrix side {}", m.shape, m.coeffs[0].nrows())));
        }
        Ok(m)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.shape.iter().product()
    }

    /// Clenshaw recurrence.
    pub fn eval(&self, u: C64) -> Mat {
        let t = (u - SEGMENT.0) / SEGMENT.1;
        let d = self.degree();
        if d == 0 {
            return self.coeffs[0].clone();
        }
        let mut b1 = self.coeffs[d].clone();
        let mut b2 = Array2::zeros(b1.dim());
        for k in (1..d).rev() {
            let mut b = &b1 * (t * 2.0) - &b2;
            b += &self.coeffs[k];
            b2 = b1;
            b1 = b;
        }
        &b1 * t - &b2 + &self.coeffs[0]
    }

    /// Coefficient of u^degree.
    pub fn leading(&self) -> Mat {
        let d = self.degree();
        let lead = if d == 0 { 1.0 } else { 2f64.powi(d as i32 - 1) / SEGMENT.1.powi(d as i32) };
        &self.coeffs[d] * re(lead)
    }

    /// Apply `g` to every coefficient, e.g. a fixed similarity transform.
    pub fn map(&self, g: impl Fn(&Mat) -> Mat) -> Self {
        SpectralMatrix { coeffs: self.coeffs.iter().map(g).collect(), shape: self.shape.clone() }
    }
}

/// Chebyshev coefficients of a polynomial of bounded degree, and the size
/// of the two coefficients above the bound relative to the largest one.
fn sample_coeffs<F>(f: &F, degree: usize) -> (Vec<Mat>, f64)
where
    F: Fn(C64) -> Mat + Sync,
{
    use rayon::prelude::*;
    let xs = chebyshev_nodes(degree + 3);
    let vals: Vec<Mat> = xs.par_iter().map(|&x| f(x)).collect();
    let mut coeffs = chebyshev_coeffs(&vals);
    let scale = coeffs.iter().map(frob).fold(0.0, f64::max);
    let excess = coeffs[degree + 1..].iter().map(frob).fold(0.0, f64::max) / scale.max(f64::MIN_POSITIVE);
    coeffs.truncate(degree + 1);
    (coeffs, excess)
}

/// How far `f` is from a polynomial of the given degree: relative size of
/// the two coefficients above the bound. Zero (to rounding) when the bound
/// holds.
pub fn degree_excess<F>(f: &F, degree: usize) -> f64
where
    F: Fn(C64) -> Mat + Sync,
{
    sample_coeffs(f, degree).1
}

/// View a matrix on `d ⊗ q` as a `d × d` grid of `q × q` blocks.
pub fn to_blocks(m: &Mat, d: usize, q: usize) -> Array4<C64> {
    let mut out = Array4::zeros((d, d, q, q));
    for a in 0..d {
        for b in 0..d {
            out.slice_mut(s![a, b, .., ..])
                .assign(&m.slice(s![a * q..(a + 1) * q, b * q..(b + 1) * q]));
        }
    }
    out
}

pub fn from_blocks(b: &Array4<C64>) -> Mat {
    let (d, _, q, _) = b.dim();
    let mut out = Array2::zeros((d * q, d * q));
    for a in 0..d {
        for c in 0..d {
            out.slice_mut(s![a * q..(a + 1) * q, c * q..(c + 1) * q])
                .assign(&b.slice(s![a, c, .., ..]));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, seed: u64) -> Mat {
        let mut s = seed;
        Array2::from_shape_fn((n, n), |_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 33) as f64) / (1u64 << 31) as f64 - 0.5;
            let b = ((s >> 13 & 0xffff) as f64) / 65536.0 - 0.5;
            c(a, b)
        })
    }

    #[test]
    fn kron_identities() {
        assert_eq!(kron(&eye(7), &eye(7)), eye(49));
        let a = sample(3, 1);
        assert_eq!(kron(&a, &eye(1)), a);
    }

    #[test]
    fn trace_of_identity_and_swap() {
        let t = partial_trace(&eye(49), &[7, 7], 0).unwrap();
        assert!(res(&t, &(eye(7) * re(7.0))) < 1e-15);
        let t = partial_trace(&swap(7, 7), &[7, 7], 0).unwrap();
        assert!(res(&t, &eye(7)) < 1e-15);
    }

    #[test]
    fn factorized_trace_and_transpose() {
        let a = sample(3, 2);
        let b = sample(4, 3);
        let ab = kron(&a, &b);
        let tr_a: C64 = a.diag().sum();
        assert!(res(&partial_trace(&ab, &[3, 4], 0).unwrap(), &(&b * tr_a)) < 1e-14);
        let tr_b: C64 = b.diag().sum();
        assert!(res(&partial_trace(&ab, &[3, 4], 1).unwrap(), &(&a * tr_b)) < 1e-14);
        let pt = partial_transpose(&ab, &[3, 4], 1).unwrap();
        assert!(res(&pt, &kron(&a, &b.t().to_owned())) < 1e-15);
    }

    #[test]
    fn shape_errors() {
        assert!(partial_trace(&eye(10), &[3, 3], 0).is_err());
        assert!(partial_transpose(&eye(9), &[3, 3], 2).is_err());
        assert!(residual(&eye(2), &eye(3)).is_err());
    }

    #[test]
    fn residual_examples() {
        assert_eq!(res(&eye(4), &eye(4)), 0.0);
        assert!((res(&eye(4), &(eye(4) * re(2.0))) - 0.5).abs() < 1e-15);
        assert_eq!(res(&zeros(3), &zeros(3)), 0.0);
    }

    #[test]
    fn rank_examples() {
        assert_eq!(numeric_rank(&eye(7), 1e-8).unwrap(), 7);
        assert_eq!(numeric_rank(&zeros(5), 1e-8).unwrap(), 0);
    }

    #[test]
    fn spectral_matrix_of_cubic() {
        // a(u) = (u+1)(u+4)(u+6) = 24 + 34u + 11u² + u³
        let f = |u: C64| Array2::from_elem((1, 1), (u + 1.0) * (u + 4.0) * (u + 6.0));
        let m = SpectralMatrix::from_fn(f, 3, vec![1]).unwrap();
        assert!((m.leading()[[0, 0]] - 1.0).norm() < 1e-12);
        assert!((m.eval(re(0.0))[[0, 0]] - 24.0).norm() < 1e-12);
        assert!((m.eval(c(0.3, 2.0))[[0, 0]] - f(c(0.3, 2.0))[[0, 0]]).norm() < 1e-11);
        assert!(SpectralMatrix::from_fn(f, 2, vec![1]).is_err());
        assert!(degree_excess(&f, 2) > 1e-3 && degree_excess(&f, 3) < 1e-14);
    }

    #[test]
    fn spectral_matrix_low_degrees() {
        let m = sample(3, 9);
        let k = SpectralMatrix::from_fn(|_u: C64| m.clone(), 0, vec![3]).unwrap();
        assert!(res(&k.eval(c(1.0, -4.0)), &m) < 1e-15 && res(&k.leading(), &m) < 1e-15);
        let lin = SpectralMatrix::from_fn(|u: C64| eye(2) * u, 1, vec![2]).unwrap();
        assert!(res(&lin.leading(), &eye(2)) < 1e-14 && res(&lin.eval(re(2.5)), &(eye(2) * re(2.5))) < 1e-14);
    }

    #[test]
    fn blocks_round_trip() {
        let m = sample(12, 5);
        assert_eq!(from_blocks(&to_blocks(&m, 3, 4)), m);
    }

    #[test]
    fn embed_13_matches_swap_conjugation() {
        let m = sample(6, 11); // on 2 ⊗ 3
        let e = embed_13(&m, 2, 4, 3);
        let p23 = kron(&eye(2), &swap(4, 3));
        let direct = p23.t().dot(&kron(&m, &eye(4))).dot(&p23);
        assert!(res(&e, &direct) < 1e-15);
    }
}
