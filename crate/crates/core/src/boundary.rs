//! Boundary reflection matrices: the non-diagonal K⁻, its dual K⁺, the
//! diagonal limit and its gauge equivalence, plus the derived constants x
//! and A that enter the T-Q relation and the asymptotics.

use ndarray::{array, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gtwo_r::{r21, r_matrix};
use crate::specmat::{eye, inv, kron, re, res, Mat};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::Config(format!("unknown branch '{other}' (expected plus|minus)"))),
        }
    }
}

/// One boundary triple (c₁, c₂, c₃), or the diagonal limit (0, 0, 2) where
/// c₁₁ is 0/0 and the matrix is taken from its closed form instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Triple {
    General([C64; 3]),
    DiagonalLimit,
}

impl Triple {
    /// Build from c₁, c₂ and a root branch for c₃.
    pub fn solve(c1: C64, c2: C64, branch: Branch) -> Result<Self> {
        Ok(Triple::General([c1, c2, solve_c3(c1, c2, branch)?]))
    }

    pub fn values(&self) -> [C64; 3] {
        match self {
            Triple::General(c) => *c,
            Triple::DiagonalLimit => [re(0.0), re(0.0), re(2.0)],
        }
    }

    pub fn constraint_residual(&self) -> f64 {
        match self {
            Triple::General(c) => constraint_residual(c),
            Triple::DiagonalLimit => 0.0,
        }
    }

    /// The constant matrix M with K⁻(u) = I + M·u.
    pub fn m_matrix(&self) -> Mat {
        match self {
            Triple::General(c) => m_matrix(c),
            Triple::DiagonalLimit => diagonal_limit_m(),
        }
    }

    pub fn k_minus(&self, u: C64) -> Mat {
        eye(7) + self.m_matrix() * u
    }
}

/// Root of α·c₃² − 4c₃ + c₁c₂ = 0 with α = c₁/c₂ + c₂/c₁.
pub fn solve_c3(c1: C64, c2: C64, branch: Branch) -> Result<C64> {
    if c1.norm() == 0.0 || c2.norm() == 0.0 {
        return Err(Error::DegenerateParams("solve_c3 needs c1·c2 ≠ 0".into()));
    }
    let alpha = c1 / c2 + c2 / c1;
    if alpha.norm() < 1e-14 {
        return Ok(c1 * c2 / 4.0);
    }
    let disc = (re(16.0) - alpha * c1 * c2 * 4.0).sqrt();
    let root = (re(4.0) + disc * branch.sign()) / (alpha * 2.0);
    if root.norm() == 0.0 {
        return Err(Error::DegenerateParams("c3 = 0 on the chosen branch".into()));
    }
    Ok(root)
}

/// |c₁c₃/c₂ + c₂c₃/c₁ + c₁c₂/c₃ − 4|.
pub fn constraint_residual(c: &[C64; 3]) -> f64 {
    let [c1, c2, c3] = *c;
    (c1 * c3 / c2 + c2 * c3 / c1 + c1 * c2 / c3 - 4.0).norm()
}

pub fn m_matrix(c: &[C64; 3]) -> Mat {
    let [c1, c2, c3] = *c;
    let c11 = c1 * c3 / c2 + c2 * c3 / c1 - 2.0;
    let c22 = re(2.0) - c2 * c3 / c1;
    let c33 = re(2.0) - c1 * c3 / c2;
    let z = re(0.0);
    array![
        [c11, z, z, z, c1, c2, z],
        [z, c22, c3, z, z, z, -c2],
        [z, c3, c33, z, z, z, c1],
        [z, z, z, re(-2.0), z, z, z],
        [c1, z, z, z, c33, -c3, z],
        [c2, z, z, z, -c3, c22, z],
        [z, -c2, c1, z, z, z, c11],
    ]
}

fn diagonal_limit_m() -> Mat {
    let mut m = Array2::zeros((7, 7));
    m[[0, 0]] = re(2.0);
    m[[1, 2]] = re(2.0);
    m[[2, 1]] = re(2.0);
    m[[3, 3]] = re(-2.0);
    m[[4, 5]] = re(-2.0);
    m[[5, 4]] = re(-2.0);
    m[[6, 6]] = re(2.0);
    m
}

/// Closed form of K⁻ in the diagonal limit (0, 0, 2).
pub fn k_c(u: C64) -> Mat {
    Triple::DiagonalLimit.k_minus(u)
}

/// K_d(u) = diag(1+2u, 1+2u, 1−2u, 1−2u, 1−2u, 1+2u, 1+2u).
pub fn k_d(u: C64) -> Mat {
    let p = re(1.0) + u * 2.0;
    let m = re(1.0) - u * 2.0;
    Array2::from_diag(&ndarray::arr1(&[p, p, m, m, m, p, p]))
}

/// Gauge matrix as printed. It maps K_d to K_c but does not commute with
/// G⊗G-conjugated R.
pub fn gauge_matrix_printed() -> Mat {
    let s2 = std::f64::consts::SQRT_2;
    let rows: [[f64; 7]; 7] = [
        [1.0, 1.0, 1.0, 0.0, s2 - 0.5, 0.5 - s2, 1.0 - 2.0 * s2],
        [s2, 1.0, 1.0, 0.0, 2.0 - 1.0 / s2, 1.0 / s2 - 2.0, 1.0 - 2.0 * s2],
        [0.0, -1.0, 1.0, 2.0 - s2, 2.0, 2.0, 0.0],
        [0.0, -2.0, 2.0, 2.0 * (1.0 + s2), 2.0 * s2, 2.0 * s2, 0.0],
        [0.0, -2.0, 2.0, 4.0, 2.0, 2.0, 0.0],
        [-2.0, -2.0, -2.0, 0.0, -1.0, 1.0, 2.0],
        [-2.0 * s2, -2.0, -2.0, 0.0, -s2, s2, 2.0],
    ];
    Array2::from_shape_fn((7, 7), |(i, j)| re(rows[i][j]))
}

/// Gauge matrix satisfying both G⁻¹K_dG = K_c and [G⊗G, R(u)] = 0.
/// Rows 1, 2, 6, 7 agree with the printed matrix; rows 3–5 are a different
/// basis of the same eigenspaces of M_c.
pub fn gauge_matrix() -> Mat {
    let s2 = std::f64::consts::SQRT_2;
    let mut g = gauge_matrix_printed();
    let fixed: [[f64; 7]; 3] = [
        [0.0, 1.0, -1.0, 2.0 * s2, -2.0, -2.0, 0.0],
        [0.0, -2.0, 2.0, -2.0 * (1.0 + s2), 2.0 * s2, 2.0 * s2, 0.0],
        [0.0, 2.0, -2.0, 4.0, -2.0, -2.0, 0.0],
    ];
    for (r, row) in fixed.iter().enumerate() {
        for j in 0..7 {
            g[[2 + r, j]] = re(row[j]);
        }
    }
    g
}

/// Both boundary triples and the derived constants.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryParams {
    pub minus: Triple,
    pub plus: Triple,
}

impl BoundaryParams {
    pub fn new(minus: Triple, plus: Triple) -> Result<Self> {
        for t in [&minus, &plus] {
            let r = t.constraint_residual();
            if r > 1e-8 {
                return Err(Error::Constraint(r));
            }
        }
        if matches!(minus, Triple::DiagonalLimit) != matches!(plus, Triple::DiagonalLimit) {
            return Err(Error::DegenerateParams(
                "x is undefined when only one side is in the diagonal limit".into(),
            ));
        }
        Ok(BoundaryParams { minus, plus })
    }

    pub fn from_pairs(c1: C64, c2: C64, b: Branch, ct1: C64, ct2: C64, bt: Branch) -> Result<Self> {
        Self::new(Triple::solve(c1, c2, b)?, Triple::solve(ct1, ct2, bt)?)
    }

    /// Table 1 boundary: c = (1.73, 0.93), c̃ = (0.07, 0.93), both + branch.
    pub fn table() -> Self {
        Self::from_pairs(re(1.73), re(0.93), Branch::Plus, re(0.07), re(0.93), Branch::Plus)
            .expect("table parameters are valid")
    }

    pub fn diagonal() -> Self {
        BoundaryParams { minus: Triple::DiagonalLimit, plus: Triple::DiagonalLimit }
    }

    pub fn k_minus(&self, u: C64) -> Mat {
        self.minus.k_minus(u)
    }

    /// K⁺(u) = K⁻(−u−6) with the tilded triple.
    pub fn k_plus(&self, u: C64) -> Mat {
        self.plus.k_minus(-u - 6.0)
    }

    /// The shared bracket S = 2Σcᵢc̃ᵢ + c₁c₂c̃₁c̃₂/(c₃c̃₃) + c₁c₃c̃₁c̃₃/(c₂c̃₂) + c₃c₂c̃₃c̃₂/(c₁c̃₁).
    fn bracket(&self) -> C64 {
        match (self.minus, self.plus) {
            (Triple::General(c), Triple::General(d)) => {
                let p: Vec<C64> = (0..3).map(|i| c[i] * d[i]).collect();
                (p[0] + p[1] + p[2]) * 2.0 + p[0] * p[1] / p[2] + p[0] * p[2] / p[1] + p[2] * p[1] / p[0]
            }
            _ => re(16.0),
        }
    }

    /// x = (S − 16)/4.
    pub fn x(&self) -> C64 {
        (self.bracket() - 16.0) / 4.0
    }

    /// Leading coefficient of t(u), from its own closed form −2(S − 2).
    pub fn big_a(&self) -> C64 {
        (self.bracket() - 2.0) * -2.0
    }
}

/// R₁₂(u−v)K₁⁻(u)R₂₁(u+v)K₂⁻(v) − K₂⁻(v)R₁₂(u+v)K₁⁻(u)R₂₁(u−v).
pub fn check_re(p: &BoundaryParams, u: C64, v: C64) -> f64 {
    let k1 = kron(&p.k_minus(u), &eye(7));
    let k2 = kron(&eye(7), &p.k_minus(v));
    let l = r_matrix(u - v).dot(&k1).dot(&r21(u + v)).dot(&k2);
    let r = k2.dot(&r_matrix(u + v)).dot(&k1).dot(&r21(u - v));
    res(&l, &r)
}

/// R₂₁(u−v)K₂⁺(v)R₁₂(−u−v−12)K₁⁺(u) − K₁⁺(u)R₂₁(−u−v−12)K₂⁺(v)R₁₂(u−v).
pub fn check_dual_re(p: &BoundaryParams, u: C64, v: C64) -> f64 {
    let k1 = kron(&p.k_plus(u), &eye(7));
    let k2 = kron(&eye(7), &p.k_plus(v));
    let w = -u - v - 12.0;
    let l = r21(u - v).dot(&k2).dot(&r_matrix(w)).dot(&k1);
    let r = k1.dot(&r21(w)).dot(&k2).dot(&r_matrix(u - v));
    res(&l, &r)
}

/// (G⁻¹K_d(u)G − K_c(u), [G⊗G, R(u)]) for a given gauge matrix.
pub fn gauge_residuals(g: &Mat, u: C64) -> Result<(f64, f64)> {
    let gi = inv(g)?;
    let first = res(&gi.dot(&k_d(u)).dot(g), &k_c(u));
    let gg = kron(g, g);
    let r = r_matrix(u);
    let second = res(&gg.dot(&r), &r.dot(&gg));
    Ok((first, second))
}

pub fn check_gauge(u: C64) -> Result<(f64, f64)> {
    gauge_residuals(&gauge_matrix(), u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specmat::c;

    #[test]
    fn c3_quadratic_example() {
        // c₁ = c₂ = 1: 2c₃² − 4c₃ + 1 = 0
        let p = solve_c3(re(1.0), re(1.0), Branch::Plus).unwrap();
        let m = solve_c3(re(1.0), re(1.0), Branch::Minus).unwrap();
        assert!((p - (1.0 + 0.5f64.sqrt())).norm() < 1e-14);
        assert!((m - (1.0 - 0.5f64.sqrt())).norm() < 1e-14);
        assert!(constraint_residual(&[re(1.0), re(1.0), p]) < 1e-12);
    }

    #[test]
    fn c3_needs_nonzero_inputs() {
        assert!(solve_c3(re(0.0), re(1.0), Branch::Plus).is_err());
    }

    #[test]
    fn table_branch_gives_printed_x() {
        let p = BoundaryParams::table();
        assert!((p.x() - (-2.7644)).norm() < 1e-4, "x = {}", p.x());
        assert!((p.big_a() + p.x() * 8.0 + 28.0).norm() < 1e-12);
        if let Triple::General(cc) = p.minus {
            assert!((cc[2] - 0.99137).norm() < 1e-5);
        }
    }

    #[test]
    fn kminus_at_zero_and_kplus_at_minus_six() {
        let p = BoundaryParams::table();
        assert!(res(&p.k_minus(re(0.0)), &eye(7)) < 1e-16);
        assert!(res(&p.k_plus(re(-6.0)), &eye(7)) < 1e-16);
    }

    #[test]
    fn numeric_limit_approaches_closed_form() {
        let eps = 1e-6;
        let t = Triple::solve(re(eps), re(eps), Branch::Plus).unwrap();
        assert!(res(&t.k_minus(re(0.7)), &k_c(re(0.7))) < 1e-5);
    }

    #[test]
    fn re_and_dual_re() {
        let p = BoundaryParams::table();
        assert!(check_re(&p, re(0.4), re(-0.9)) < 1e-12);
        assert!(check_re(&p, re(0.3), re(0.3)) < 1e-14);
        assert!(check_dual_re(&p, re(0.4), re(-0.9)) < 1e-12);
        let q = BoundaryParams::from_pairs(c(0.8, 0.1), re(1.3), Branch::Plus, re(0.6), c(0.9, -0.2), Branch::Minus).unwrap();
        assert!(check_re(&q, c(0.2, 0.3), re(-1.1)) < 1e-12);
        assert!(check_dual_re(&q, c(0.2, 0.3), re(-1.1)) < 1e-12);
    }

    #[test]
    fn gauge_identities() {
        for u in [re(0.0), re(0.7), re(-2.3)] {
            let (a, b) = check_gauge(u).unwrap();
            assert!(a < 1e-12 && b < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn printed_gauge_matrix_fails_commutation() {
        let (a, b) = gauge_residuals(&gauge_matrix_printed(), re(0.7)).unwrap();
        assert!(a < 1e-12);
        assert!(b > 0.1);
    }

    #[test]
    fn diagonal_boundary_has_zero_x() {
        assert_eq!(BoundaryParams::diagonal().x(), re(0.0));
    }
}
