//! Published root sets for the one- and two-site open chains, and the
//! pipelines that reproduce them against exact diagonalization.
//!
//! All rows share θ = 0, u₀ = 0.1·√2 and the boundary of
//! [`BoundaryParams::table`].

use serde::{Deserialize, Serialize};

use crate::bethe::{bae_residuals_ratio, has_singular_pair, singular_indices, lambda_fund, newton, rel, BetheRoots, Mode, SolveOptions, TQContext};
use crate::boundary::{BoundaryParams, Branch};
use crate::error::{Error, Result};
use crate::specmat::{c, re};
use crate::transfer::{diagonalize, Chain, ChainSpec};
use crate::C64;

/// Spectral point at which the tables list Λ.
pub fn u0() -> C64 {
    re(0.1 * std::f64::consts::SQRT_2)
}

/// Printed value of the inhomogeneity parameter, four decimals.
pub const X_PRINTED: f64 = -2.7644;

#[derive(Clone, Debug)]
pub struct TableRow {
    pub level: usize,
    pub lambda: f64,
    pub roots: BetheRoots,
}

/// One choice of c₃ and c̃₃ roots for the table boundary.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BranchChoice {
    pub minus: Branch,
    pub plus: Branch,
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub x: C64,
}

/// All four branch pairs for the table's (c₁, c₂) and (c̃₁, c̃₂), nearest
/// to the printed x first.
pub fn branch_scan() -> Result<Vec<BranchChoice>> {
    let mut out = Vec::new();
    for minus in [Branch::Plus, Branch::Minus] {
        for plus in [Branch::Plus, Branch::Minus] {
            let p = BoundaryParams::from_pairs(re(1.73), re(0.93), minus, re(0.07), re(0.93), plus)?;
            out.push(BranchChoice { minus, plus, x: p.x() });
        }
    }
    out.sort_by(|a, b| (a.x - X_PRINTED).norm().total_cmp(&(b.x - X_PRINTED).norm()));
    Ok(out)
}

pub fn table1() -> Vec<TableRow> {
    let row = |level, lambda, mu1: Vec<C64>, mu2: Vec<C64>| TableRow { level, lambda, roots: BetheRoots { mu1, mu2, mode: Mode::Open } };
    vec![
        row(1, -5951.5545, vec![], vec![]),
        row(2, -4691.3338, vec![re(-0.935732084981)], vec![re(-0.708786384923)]),
        row(3, -2427.0809, vec![re(-0.267170490371)], vec![c(0.0, -1.64756781842)]),
        row(4, -1906.599, vec![c(0.0, 2.09276820469), c(0.0, -0.119459001451)], vec![c(0.0, -1.74925136686), c(0.0, -2.67861768166)]),
    ]
}

#[derive(Deserialize)]
struct RawRow {
    level: usize,
    lambda: f64,
    mu1: Vec<[f64; 2]>,
    mu2: Vec<[f64; 2]>,
}

pub fn table2() -> Result<Vec<TableRow>> {
    let raw: Vec<RawRow> =
        serde_json::from_str(include_str!("../data/table2.json")).map_err(|e| Error::Config(format!("table fixture: {e}")))?;
    let conv = |v: &[[f64; 2]]| v.iter().map(|p| c(p[0], p[1])).collect();
    Ok(raw
        .into_iter()
        .map(|r| TableRow { level: r.level, lambda: r.lambda, roots: BetheRoots { mu1: conv(&r.mu1), mu2: conv(&r.mu2), mode: Mode::Open } })
        .collect())
}

pub fn table_chain(n_sites: usize) -> Result<Chain> {
    Chain::new(ChainSpec::open(vec![re(0.0); n_sites], BoundaryParams::table()))
}

pub fn table_context(n_sites: usize) -> TQContext {
    TQContext::open(vec![re(0.0); n_sites], &BoundaryParams::table())
}

/// Distinct eigenvalues of t(u₀) on the table chain, with multiplicities.
pub fn ed_levels(n_sites: usize) -> Result<Vec<(C64, usize)>> {
    let ch = table_chain(n_sites)?;
    Ok(diagonalize(&ch.t(u0()), 1e-8)?.levels)
}

#[derive(Clone, Debug, Serialize)]
pub struct RowCheck {
    pub level: usize,
    pub printed: f64,
    /// Λ(u₀) from the printed roots.
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub from_roots: C64,
    pub rel_err_printed: f64,
    /// Nearest distinct ED level.
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub nearest_ed: C64,
    pub rel_err_ed: f64,
    /// Bethe equations in ratio form on the printed roots (∞-norm), leaving
    /// out the equations of a singular pair.
    pub ratio_residual: f64,
    /// μ¹ holds a pair at ±i/2; Newton on the zero form is not expected
    /// to converge there.
    pub singular: bool,
    /// Residual after polishing the printed roots with Newton.
    pub solved_residual: f64,
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub solved_lambda: C64,
    pub rel_err_solved: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TableReport {
    pub table: usize,
    pub ed_level_count: usize,
    pub ed_levels: Vec<f64>,
    pub rows: Vec<RowCheck>,
    /// Printed levels hit by some ED level within `tol`.
    pub ed_matched: usize,
}

impl TableReport {
    /// Every row reproduces its printed Λ and nearest ED level.
    pub fn levels_ok(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| r.rel_err_printed <= tol && r.rel_err_ed <= tol)
    }

    /// Every regular row polishes to a Bethe solution with the same level;
    /// singular rows satisfy the ratio form to `ratio_tol`.
    pub fn roots_ok(&self, tol: f64, bae_tol: f64, ratio_tol: f64) -> bool {
        self.rows.iter().all(|r| {
            if r.singular {
                r.ratio_residual <= ratio_tol
            } else {
                r.solved_residual <= bae_tol && r.rel_err_solved <= tol
            }
        })
    }
}

/// Run one table end to end: ED at u₀, Λ(u₀) from each printed root set,
/// Newton polish from the printed roots, and level matching.
pub fn reproduce(table: usize, tol: f64) -> Result<TableReport> {
    let (rows, n) = match table {
        1 => (table1(), 1),
        2 => (table2()?, 2),
        _ => return Err(Error::Config(format!("no table {table}"))),
    };
    let levels: Vec<C64> = ed_levels(n)?.into_iter().map(|(v, _)| v).collect();
    let ctx = table_context(n);
    let opts = SolveOptions::default();
    let mut out = Vec::new();
    for row in &rows {
        let from_roots = lambda_fund(&ctx, &row.roots, u0())?;
        let nearest = *levels.iter().min_by(|x, y| rel(**x, from_roots).total_cmp(&rel(**y, from_roots))).expect("non-empty spectrum");
        let solved = newton(&ctx, &row.roots, &opts);
        let solved_lambda = lambda_fund(&ctx, &solved.roots, u0())?;
        out.push(RowCheck {
            level: row.level,
            printed: row.lambda,
            from_roots,
            rel_err_printed: rel(from_roots, re(row.lambda)),
            nearest_ed: nearest,
            rel_err_ed: rel(from_roots, nearest),
            ratio_residual: {
                let skip = singular_indices(&row.roots);
                let r = bae_residuals_ratio(&ctx, &row.roots);
                r.into_iter().enumerate().filter(|(k, _)| !skip.contains(k)).map(|(_, x)| x).fold(0.0, f64::max)
            },
            singular: has_singular_pair(&row.roots),
            solved_residual: solved.residual,
            solved_lambda,
            rel_err_solved: rel(solved_lambda, nearest),
        });
    }
    let ed_matched = rows.iter().filter(|r| levels.iter().any(|&l| rel(l, re(r.lambda)) <= tol)).count();
    Ok(TableReport { table, ed_level_count: levels.len(), ed_levels: levels.iter().map(|l| l.re).collect(), rows: out, ed_matched })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_has_thirty_levels_with_balanced_roots() {
        let t = table2().unwrap();
        assert_eq!(t.len(), 30);
        assert!(t.iter().all(|r| r.roots.mu1.len() == r.roots.mu2.len()));
        assert!(t.windows(2).all(|w| w[0].level + 1 == w[1].level));
    }

    #[test]
    fn branch_scan_picks_the_table_boundary() {
        let scan = branch_scan().unwrap();
        assert_eq!((scan[0].minus, scan[0].plus), (Branch::Plus, Branch::Plus));
        assert!((scan[1].x - X_PRINTED).norm() > 0.1);
    }

    #[test]
    fn table_boundary_gives_printed_x() {
        assert!((BoundaryParams::table().x() - X_PRINTED).norm() < 1e-4);
    }
}
