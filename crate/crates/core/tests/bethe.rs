use g2chain::bethe::{self, *};
use g2chain::boundary::{BoundaryParams, Branch};
use g2chain::specmat::{c, re};
use g2chain::tables::{self, u0};
use g2chain::transfer::{diagonalize, Chain, ChainSpec, Kind};
use g2chain::C64;

fn quick(seed: u64) -> SolveOptions {
    SolveOptions { random_starts: 200, rng_seed: seed, ..Default::default() }
}

#[test]
fn discovery_finds_every_single_site_level() {
    let ctx = tables::table_context(1);
    let levels: Vec<C64> = tables::ed_levels(1).unwrap().into_iter().map(|l| l.0).collect();
    let mut sols = vec![];
    for l in 0..=2 {
        let out = solve_bae(&ctx, l, l, &[], &quick(11)).unwrap();
        println!("L={l}: {} solutions from {} starts, best {:.2e}", out.solutions.len(), out.attempts, out.best_residual);
        sols.extend(out.solutions.into_iter().map(|s| s.roots));
    }
    let m = match_spectrum(&ctx, &sols, &levels, u0(), 1e-8).unwrap();
    for e in &m.entries {
        println!("{:?} level {} err {:.2e}", e.lambda, e.level, e.rel_err);
    }
    assert_eq!(m.coverage, 1.0);
}

#[test]
fn solved_roots_satisfy_functional_relations() {
    let ctx = tables::table_context(1);
    for row in tables::table1() {
        let s = newton(&ctx, &row.roots, &SolveOptions::default());
        let rep = relations(&ctx, &s.roots, 1e-5).unwrap();
        assert!(rep.ok(), "level {}:\n{rep}", row.level);
    }
}

fn complex_boundary() -> BoundaryParams {
    BoundaryParams::from_pairs(c(0.8, 0.1), re(1.3), Branch::Plus, re(0.6), c(0.9, -0.2), Branch::Minus).unwrap()
}

/// Inhomogeneous chain with a complex boundary: every solution found must be
/// an ED eigenvalue of t, t̄ and t̃ at a generic point, and satisfy the
/// functional relations at ±θ.
#[test]
fn inhomogeneous_solutions_match_all_three_spectra() {
    let th = vec![c(0.31, 0.04)];
    let p = complex_boundary();
    let ctx = TQContext::open(th.clone(), &p);
    let ch = Chain::new(ChainSpec::open(th, p)).unwrap();
    let u = c(0.23, -0.17);
    let spectra: Vec<Vec<C64>> =
        Kind::ALL.iter().map(|&k| diagonalize(&ch.transfer(k, u), 1e-8).unwrap().eigenvalues).collect();
    let mut found = 0;
    for l in 0..=2 {
        for s in solve_bae(&ctx, l, l, &[], &quick(5)).unwrap().solutions {
            found += 1;
            for (k, spec) in Kind::ALL.iter().zip(&spectra) {
                let v = eigenvalue(&ctx, &s.roots, *k, u).unwrap();
                let best = spec.iter().map(|&e| rel(e, v)).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-7, "{k:?} eigenvalue {v} off by {best:.2e}");
            }
            let rep = relations(&ctx, &s.roots, 1e-5).unwrap();
            assert!(rep.ok(), "{rep}");
        }
    }
    assert!(found >= 4, "found {found}");
}

#[test]
fn printed_tilde_term_does_not_match_ed() {
    let ctx = tables::table_context(1);
    let ch = tables::table_chain(1).unwrap();
    let u = c(0.4, 0.3);
    let ed = diagonalize(&ch.tt(u), 1e-8).unwrap().eigenvalues;
    let dist = |v: C64| ed.iter().map(|&e| rel(e, v)).fold(f64::INFINITY, f64::min);
    let mut worst_printed = 0f64;
    for row in tables::table1() {
        let good = lambda_tilde_form(&ctx, &row.roots, u, TildeForm::Corrected).unwrap();
        let bad = lambda_tilde_form(&ctx, &row.roots, u, TildeForm::Printed).unwrap();
        assert!(dist(good) < 1e-8);
        worst_printed = worst_printed.max(dist(bad));
    }
    assert!(worst_printed > 1e-2);
}

#[test]
fn diagonal_limit_matches_the_diagonal_chain() {
    // x = 0: the f-terms drop out and the spectrum is that of the diagonal model
    let p = BoundaryParams::diagonal();
    let ctx = TQContext::open(vec![re(0.0)], &p);
    let ch = Chain::new(ChainSpec::open(vec![re(0.0)], p)).unwrap();
    let u = c(0.3, 0.1);
    let levels: Vec<C64> = diagonalize(&ch.t(u), 1e-8).unwrap().levels.into_iter().map(|l| l.0).collect();
    let mut sols = vec![];
    for l in 0..=2 {
        sols.extend(solve_bae(&ctx, l, l, &[], &quick(3)).unwrap().solutions.into_iter().map(|s| s.roots));
    }
    let m = match_spectrum(&ctx, &sols, &levels, u, 1e-8).unwrap();
    assert!(m.entries.iter().all(|e| e.rel_err < 1e-8), "{m:?}");
    assert_eq!(m.coverage, 1.0);
}

#[test]
fn periodic_roots_cancel_poles_and_match_ed() {
    let th = vec![c(0.27, 0.0), c(-0.41, 0.0)];
    let ctx = TQContext::periodic(th.clone());
    let ch = Chain::new(ChainSpec::periodic(th)).unwrap();
    let u = c(0.19, 0.33);
    let ed: Vec<Vec<C64>> = Kind::ALL.iter().map(|&k| diagonalize(&ch.transfer(k, u), 1e-8).unwrap().eigenvalues).collect();
    let mut found = 0;
    for (l1, l2) in [(0, 0), (1, 0), (2, 1)] {
        for s in solve_bae(&ctx, l1, l2, &[], &quick(9)).unwrap().solutions {
            found += 1;
            let rep = relations(&ctx, &s.roots, 1e-6).unwrap();
            assert!(rep.ok(), "{rep}");
            for (k, spec) in Kind::ALL.iter().zip(&ed) {
                let v = eigenvalue(&ctx, &s.roots, *k, u).unwrap();
                let best = spec.iter().map(|&e| rel(e, v)).fold(f64::INFINITY, f64::min);
                assert!(best < 1e-7, "({l1},{l2}) {k:?}: {best:.2e}");
            }
        }
    }
    assert!(found >= 3);
}

#[test]
fn unsolved_roots_leave_a_pole() {
    // one arbitrary μ¹: Λ is not a polynomial
    let ctx = TQContext::periodic(vec![re(0.2)]);
    let r = BetheRoots::new(vec![c(0.37, -0.21)], vec![], Mode::Periodic).unwrap();
    let (_, held) = eigenvalue_poly(&ctx, &r, Kind::Fund).unwrap();
    assert!(held > 1e-4);
    let _ = bethe::bae_residuals(&ctx, &r).unwrap();
}
