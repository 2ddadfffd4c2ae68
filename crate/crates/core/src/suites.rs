//! Verification suites: each one gathers the identity checks of a layer
//! into a [`Report`] with its default tolerance. The CLI `verify` command
//! and the acceptance runner both call these.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bethe::{relations, solve_bae, match_spectrum, SolveOptions, TQContext};
use crate::boundary::{self, check_dual_re, check_gauge, check_re, gauge_matrix_printed, gauge_residuals, k_d, BoundaryParams};
use crate::error::{Error, Result};
use crate::fusion::{self, FusedBoundary, FusionCore, Level};
use crate::gtwo_r::{self, ChannelProjectors};
use crate::report::Report;
use crate::specmat::{c, eigvals, re, spectrum_distance};
use crate::tables;
use crate::transfer::checks::{self as tc, random_boundary, random_thetas};
use crate::transfer::{diagonalize, Chain, ChainSpec};
use crate::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    R,
    Boundary,
    Fusion,
    Transfer,
    Periodic,
    Hamiltonian,
    Bethe,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::R, Suite::Boundary, Suite::Fusion, Suite::Transfer, Suite::Periodic, Suite::Hamiltonian, Suite::Bethe];

    pub fn name(self) -> &'static str {
        match self {
            Suite::R => "r",
            Suite::Boundary => "boundary",
            Suite::Fusion => "fusion",
            Suite::Transfer => "transfer",
            Suite::Periodic => "periodic",
            Suite::Hamiltonian => "hamiltonian",
            Suite::Bethe => "bethe",
        }
    }

    pub fn default_tol(self) -> f64 {
        match self {
            Suite::R | Suite::Boundary | Suite::Fusion => 1e-9,
            Suite::Transfer | Suite::Periodic | Suite::Hamiltonian => 1e-7,
            Suite::Bethe => 1e-5,
        }
    }

    pub fn run(self, seed: u64, tol: Option<f64>) -> Result<Report> {
        let tol = tol.unwrap_or(self.default_tol());
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            Suite::R => r_suite(&mut rng, tol),
            Suite::Boundary => boundary_suite(&mut rng, tol),
            Suite::Fusion => fusion_suite(&mut rng, tol),
            Suite::Transfer => transfer_suite(&mut rng, tol),
            Suite::Periodic => periodic_suite(&mut rng, tol),
            Suite::Hamiltonian => hamiltonian_suite(&mut rng, tol),
            Suite::Bethe => bethe_suite(seed, tol),
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::Config(format!("unknown suite '{s}', expected one of {}", names.join(", ")))
        })
    }
}

/// Spectral parameter in the box |Re| ≤ 3, |Im| ≤ 2.
pub fn random_point<R: Rng>(rng: &mut R) -> C64 {
    c(rng.random_range(-3.0..3.0), rng.random_range(-2.0..2.0))
}

fn worst(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn flag(rep: &mut Report, name: impl Into<String>, ok: bool) {
    rep.push(name, if ok { 0.0 } else { 1.0 }, 0.5);
}

fn r_suite<R: Rng>(rng: &mut R, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let pts: Vec<(C64, C64)> = (0..20).map(|_| (random_point(rng), random_point(rng))).collect();
    let proj = ChannelProjectors::extract()?;
    rep.push("R: Yang-Baxter equation", worst(pts.iter().map(|&(u, v)| gtwo_r::check_ybe(u, v))), tol);
    rep.push("R: unitarity R12(u)R21(-u) = rho(u)", worst(pts.iter().map(|&(u, _)| gtwo_r::check_unitarity(u))), tol);
    rep.push("R: crossing with V", worst(pts.iter().map(|&(u, _)| gtwo_r::check_crossing(u))), tol);
    rep.push_erratum(
        "R: crossing-unitarity, printed sign",
        worst(pts.iter().map(|&(u, _)| gtwo_r::crossing_unitarity_residual(u, -1.0))),
        tol,
        "right-hand side sign is +, not -",
    );
    rep.push("R: crossing-unitarity", worst(pts.iter().map(|&(u, _)| gtwo_r::check_crossing_unitarity(u))), tol);
    rep.push("R: regularity R(0) = 24 P", gtwo_r::check_regularity(), tol);
    rep.push("R: channel projector decomposition", worst(pts.iter().map(|&(u, _)| gtwo_r::check_projector_decomposition(&proj, u))), tol);
    let ranks = gtwo_r::rank_profile()?;
    flag(&mut rep, format!("R: ranks at -6, -4, -1, 1 are {ranks:?}, expected [1, 7, 15, 34]"), ranks == [1, 7, 15, 34]);
    Ok(rep)
}

fn boundary_suite<R: Rng>(rng: &mut R, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let params: Vec<BoundaryParams> = (0..4).map(|_| random_boundary(rng)).chain([BoundaryParams::table()]).collect();
    let pts: Vec<(C64, C64)> = (0..5).map(|_| (random_point(rng), random_point(rng))).collect();
    rep.push("K: reflection equation", worst(params.iter().flat_map(|p| pts.iter().map(move |&(u, v)| check_re(p, u, v)))), tol);
    rep.push("K: dual reflection equation", worst(params.iter().flat_map(|p| pts.iter().map(move |&(u, v)| check_dual_re(p, u, v)))), tol);
    let constraint = worst(params.iter().flat_map(|p| [p.minus.constraint_residual(), p.plus.constraint_residual()]));
    rep.push("K: parameter constraint", constraint, 1e-12);
    let gauge: Vec<(f64, f64)> = pts.iter().map(|&(u, _)| check_gauge(u)).collect::<Result<_>>()?;
    rep.push("K: G^-1 K_d G = K_c", worst(gauge.iter().map(|g| g.0)), tol);
    rep.push("K: [G x G, R(u)] = 0", worst(gauge.iter().map(|g| g.1)), tol);
    let printed: Vec<(f64, f64)> = pts.iter().map(|&(u, _)| gauge_residuals(&gauge_matrix_printed(), u)).collect::<Result<_>>()?;
    rep.push("K: printed G maps K_d to K_c", worst(printed.iter().map(|g| g.0)), tol);
    rep.push_erratum("K: [G x G, R(u)] = 0, printed G", worst(printed.iter().map(|g| g.1)), tol, "rows 3-5 of G need a different eigenspace basis");
    rep.push("K: A + 8x + 28 = 0", worst(params.iter().map(|p| (p.big_a() + p.x() * 8.0 + 28.0).norm() / p.big_a().norm().max(1.0))), 1e-10);
    let x = BoundaryParams::table().x();
    rep.push("K: table boundary gives x = -2.7644", (x - tables::X_PRINTED).norm() / 2.7644, 5e-5);
    let diag = boundary::k_c(re(0.3));
    rep.push("K: diagonal limit is the closed form", crate::specmat::res(&BoundaryParams::diagonal().k_minus(re(0.3)), &diag), tol);
    Ok(rep)
}

fn fusion_suite<R: Rng>(rng: &mut R, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let core = FusionCore::get();
    let p = random_boundary(rng);
    let fb = FusedBoundary::new(core, &p)?;
    let pts: Vec<(C64, C64)> = (0..10).map(|_| (random_point(rng), random_point(rng))).collect();
    for lvl in [Level::Bar, Level::Tilde] {
        let d = lvl.dim();
        rep.push(format!("fused YBE, {d}-dim"), worst(pts.iter().map(|&(u, v)| fusion::check_fused_ybe(core, lvl, u, v))), tol);
        rep.push(format!("fused unitarity, {d}-dim"), worst(pts.iter().map(|&(u, _)| fusion::check_fused_unitarity(core, lvl, u))), tol);
        rep.push(format!("fused reflection equation, {d}-dim"), worst(pts.iter().map(|&(u, v)| fusion::check_fused_re(core, &fb, &p, lvl, u, v))), tol);
        rep.push(
            format!("fused dual reflection equation, {d}-dim"),
            worst(pts.iter().map(|&(u, v)| fusion::check_fused_dual_re(core, &fb, &p, lvl, u, v))),
            tol,
        );
    }
    let cross: Vec<f64> = pts.iter().map(|&(u, _)| fusion::check_fused_crossing(core, u)).collect::<Result<_>>()?;
    rep.push("fused crossing, 15-dim", worst(cross.into_iter()), tol);
    let printed: Vec<f64> =
        pts.iter().map(|&(u, _)| fusion::fused_crossing_residual(core, &core.crossing_bar_printed(), u)).collect::<Result<_>>()?;
    rep.push_erratum("fused crossing, 15-dim, printed crossing matrix", worst(printed.into_iter()), tol, "singlet direction needs a factor 7/5");
    rep.push("singlet fusion of R13 R23", worst(pts.iter().map(|&(u, _)| fusion::check_one_dim_fusion(u))), tol);
    rep.push("fused R matches its projected product", worst(pts.iter().map(|&(u, _)| fusion::round_trip_residual(core, u))), tol);
    let tight = fusion::degree_tightness(core, &fb);
    flag(
        &mut rep,
        format!("degree bounds {:?} are tight (one lower fails: {:.1e})", fusion::DEGREES, worst(tight.iter().map(|t| 1.0 / t))),
        tight.iter().all(|&t| t > 1e-3),
    );
    let ranks = fusion::fused_rank_profile(core)?;
    flag(&mut rep, format!("fused ranks {ranks:?}, expected [34, 49, 7]"), ranks == [34, 49, 7]);
    let mut hi = [0f64; 4];
    for &(u, _) in pts.iter().take(3) {
        let [(r49, k49), (r7, k7)] = fusion::check_higher_fusion(core, &fb, &p, u)?;
        for (slot, v) in [r49, k49, r7, k7].into_iter().enumerate() {
            hi[slot] = hi[slot].max(v);
        }
    }
    rep.push("49-dim fusion of the 34-dim R (spectrum)", hi[0], 1e-8);
    rep.push("49-dim fusion of the 34-dim K (spectrum)", hi[1], 1e-8);
    rep.push("7-dim fusion of the 34-dim R (spectrum)", hi[2], 1e-8);
    rep.push("7-dim fusion of the 34-dim K (spectrum)", hi[3], 1e-8);
    Ok(rep)
}

fn tagged(rep: Report, tag: &str) -> Report {
    let mut out = Report::new();
    for mut c in rep.checks {
        c.name = format!("{tag} {}", c.name);
        out.checks.push(c);
    }
    out
}

/// Sorted-spectrum distance of t(u) under a shuffle of the inhomogeneities.
fn permutation_residual<R: Rng>(spec: &ChainSpec, u: C64, rng: &mut R) -> Result<f64> {
    let ch = Chain::new(spec.clone())?;
    let mut shuffled = spec.clone();
    shuffled.thetas.reverse();
    shuffled.thetas.shuffle(rng);
    if shuffled.thetas == spec.thetas {
        shuffled.thetas.reverse();
    }
    let other = Chain::new(shuffled)?;
    Ok(spectrum_distance(&eigvals(&ch.t(u))?, &eigvals(&other.t(u))?))
}

fn transfer_suite<R: Rng>(rng: &mut R, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    for n in [1, 2] {
        let spec = ChainSpec::open(random_thetas(rng, n), random_boundary(rng));
        let ch = Chain::new(spec.clone())?;
        let tag = format!("[open N={n}]");
        let us: Vec<C64> = (0..2).map(|_| random_point(rng)).collect();
        let pairs: Vec<(C64, C64)> = (0..2).map(|_| (random_point(rng), random_point(rng))).collect();
        rep.extend(tagged(tc::check_commutativity(&ch, &pairs, tol), &tag));
        rep.extend(tagged(tc::check_crossing(&ch, &us, tol), &tag));
        rep.extend(tagged(tc::check_open_identities(&ch, tol), &tag));
        rep.extend(tagged(tc::check_special_points(&ch, tol), &tag));
        rep.extend(tagged(tc::check_asymptotics(&ch, tol)?, &tag));
        if n == 2 {
            rep.extend(tagged(tc::check_monodromy_relations(&ch, us[0], us[1], 2, rng, tol), &tag));
            rep.push(format!("{tag} spectrum invariant under permuting theta"), permutation_residual(&spec, us[0], rng)?, 1e-8);
        }
    }
    // K_c and K_d are related by G on each site, so the spectra agree
    for n in [1, 2] {
        let ch = Chain::new(ChainSpec::open(random_thetas(rng, n), BoundaryParams::diagonal()))?;
        let u = random_point(rng);
        let td = ch.transfer_with(&k_d(-u - 6.0), &k_d(u), u);
        let d = spectrum_distance(&eigvals(&ch.t(u))?, &eigvals(&td)?);
        rep.push(format!("[diagonal N={n}] spectrum invariant under the gauge G"), d, 1e-8);
    }
    Ok(rep)
}

fn periodic_suite<R: Rng>(rng: &mut R, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    for n in [1, 2] {
        let ch = Chain::new(ChainSpec::periodic(random_thetas(rng, n)))?;
        let tag = format!("[periodic N={n}]");
        rep.extend(tagged(tc::check_periodic_identities(&ch, tol), &tag));
        rep.extend(tagged(tc::check_asymptotics(&ch, tol)?, &tag));
        let pairs = [(random_point(rng), random_point(rng))];
        rep.extend(tagged(tc::check_commutativity(&ch, &pairs, tol), &tag));
    }
    Ok(rep)
}

fn hamiltonian_suite<R: Rng>(rng: &mut R, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let ch = tables::table_chain(2)?;
    let us: Vec<C64> = (0..3).map(|_| random_point(rng)).collect();
    rep.extend(tagged(tc::check_hamiltonian(&ch, &us, tol)?, "[N=2]"));
    let one = tables::table_chain(1)?;
    let mult = |levels: Vec<(C64, usize)>| {
        let mut m: Vec<usize> = levels.into_iter().map(|l| l.1).collect();
        m.sort_unstable();
        m
    };
    let h = mult(diagonalize(&one.hamiltonian()?, 1e-6)?.levels);
    let t = mult(tables::ed_levels(1)?);
    flag(&mut rep, format!("[N=1] H multiplicities {h:?} match t(u0) levels {t:?}"), h == t && h.len() == 4);
    Ok(rep)
}

/// Solve the Bethe equations on three small chains and check every solution
/// against the functional relations and the ED spectrum.
fn bethe_suite(seed: u64, tol: f64) -> Result<Report> {
    let mut rep = Report::new();
    let opts = SolveOptions { rng_seed: seed, ..Default::default() };
    let table = tables::table_context(1);
    let complex = BoundaryParams::from_pairs(c(0.8, 0.1), re(1.3), boundary::Branch::Plus, re(0.6), c(0.9, -0.2), boundary::Branch::Minus)?;
    let cases: Vec<(String, TQContext, Chain, Vec<(usize, usize)>)> = vec![
        ("table N=1".into(), table, tables::table_chain(1)?, vec![(0, 0), (1, 1), (2, 2)]),
        (
            "complex boundary N=1".into(),
            TQContext::open(vec![c(0.31, 0.04)], &complex),
            Chain::new(ChainSpec::open(vec![c(0.31, 0.04)], complex))?,
            vec![(0, 0), (1, 1), (2, 2)],
        ),
        (
            "periodic N=2".into(),
            TQContext::periodic(vec![re(0.27), re(-0.41)]),
            Chain::new(ChainSpec::periodic(vec![re(0.27), re(-0.41)]))?,
            vec![(0, 0), (1, 0), (2, 1)],
        ),
    ];
    let u = c(0.23, -0.17);
    for (name, ctx, ch, counts) in cases {
        let levels: Vec<C64> = diagonalize(&ch.t(u), 1e-8)?.levels.into_iter().map(|l| l.0).collect();
        let mut sols = Vec::new();
        for (l1, l2) in counts {
            sols.extend(solve_bae(&ctx, l1, l2, &[], &opts)?.solutions.into_iter().map(|s| s.roots));
        }
        let mut worst_rel = Report::new();
        for s in &sols {
            worst_rel.extend(relations(&ctx, s, tol)?);
        }
        let failures = worst_rel.failures().len();
        rep.push(
            format!("[{name}] {} solutions satisfy the functional relations ({failures} failing checks)", sols.len()),
            worst_rel.max_residual(),
            tol,
        );
        let m = match_spectrum(&ctx, &sols, &levels, u, 1e-8)?;
        rep.push(format!("[{name}] every solution is an ED level of t"), worst(m.entries.iter().map(|e| e.rel_err)), 1e-8);
        flag(&mut rep, format!("[{name}] solutions found: {}", sols.len()), !sols.is_empty());
        if name.starts_with("table") {
            flag(&mut rep, format!("[{name}] all {} levels covered (coverage {:.2})", levels.len(), m.coverage), m.coverage == 1.0);
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("rr".parse::<Suite>().is_err());
        assert!(Suite::R.run(1, Some(-1.0)).is_err());
    }
}
