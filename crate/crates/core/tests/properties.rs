use g2chain::bethe::{bae_residuals, lambda_bar, lambda_fund, BetheRoots, Mode, TQContext};
use g2chain::boundary::BoundaryParams;
use g2chain::gtwo_r::{check_crossing_unitarity, check_unitarity, check_ybe};
use g2chain::report::round12;
use g2chain::specmat::{c, eigvals, re, res, spectrum_distance, Mat, SpectralMatrix};
use g2chain::transfer::{group_levels, Chain, ChainSpec};
use g2chain::C64;
use ndarray::Array2;
use proptest::prelude::*;

fn point() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b))
}

fn roots(n: usize) -> impl Strategy<Value = Vec<C64>> {
    proptest::collection::vec((0.2..2.5f64, -2.0..2.0f64).prop_map(|(a, b)| c(a, b)), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn r_matrix_identities_hold_everywhere(u in point(), v in point()) {
        prop_assert!(check_ybe(u, v) < 1e-12);
        prop_assert!(check_unitarity(u) < 1e-12);
        prop_assert!(check_crossing_unitarity(u) < 1e-12);
    }

    #[test]
    fn transfer_matrix_is_crossing_symmetric(th in point(), u in point()) {
        let ch = Chain::new(ChainSpec::open(vec![th * 0.3], BoundaryParams::table())).unwrap();
        prop_assert!(res(&ch.t(u), &ch.t(-u - 6.0)) < 1e-12);
    }

    #[test]
    fn spectrum_ignores_site_order(a in point(), b in point(), u in point()) {
        let p = BoundaryParams::table();
        let one = Chain::new(ChainSpec::open(vec![a * 0.3, b * 0.3], p)).unwrap();
        let two = Chain::new(ChainSpec::open(vec![b * 0.3, a * 0.3], p)).unwrap();
        let d = spectrum_distance(&eigvals(&one.t(u)).unwrap(), &eigvals(&two.t(u)).unwrap());
        prop_assert!(d < 1e-9, "{d}");
    }

    #[test]
    fn canonical_form_absorbs_sign_and_order(r1 in roots(2), r2 in roots(2), flip in any::<[bool; 4]>()) {
        let a = BetheRoots { mu1: r1.clone(), mu2: r2.clone(), mode: Mode::Open };
        let f = |z: C64, s: bool| if s { -z } else { z };
        let b = BetheRoots {
            mu1: vec![f(r1[1], flip[0]), f(r1[0], flip[1])],
            mu2: vec![f(r2[1], flip[2]), f(r2[0], flip[3])],
            mode: Mode::Open,
        };
        prop_assert!(a.same_as(&b, 1e-12));
        prop_assert_eq!(a.canonical().canonical(), a.canonical());
        prop_assert!(a.canonical().same_as(&b.canonical(), 1e-12));
    }

    #[test]
    fn open_eigenvalues_do_not_see_root_signs(r1 in roots(1), r2 in roots(1), u in point()) {
        // each Q-factor pairs ±μ
        let ctx = TQContext::open(vec![re(0.0)], &BoundaryParams::table());
        let a = BetheRoots { mu1: r1.clone(), mu2: r2.clone(), mode: Mode::Open };
        let b = BetheRoots { mu1: vec![-r1[0]], mu2: vec![-r2[0]], mode: Mode::Open };
        let (la, lb) = (lambda_fund(&ctx, &a, u).unwrap(), lambda_fund(&ctx, &b, u).unwrap());
        prop_assert!((la - lb).norm() <= 1e-10 * la.norm().max(1.0));
        let (ba, bb) = (lambda_bar(&ctx, &a, u).unwrap(), lambda_bar(&ctx, &b, u).unwrap());
        prop_assert!((ba - bb).norm() <= 1e-10 * ba.norm().max(1.0));
        let ra = bae_residuals(&ctx, &a).unwrap();
        let rb = bae_residuals(&ctx, &b).unwrap();
        for (x, y) in ra.iter().zip(&rb) {
            prop_assert!((x.norm() - y.norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_matrix_reproduces_polynomials(co in proptest::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..8), u in point()) {
        let coeffs: Vec<C64> = co.iter().map(|&(a, b)| c(a, b)).collect();
        let f = |x: C64| -> Mat { Array2::from_elem((1, 1), coeffs.iter().rev().fold(re(0.0), |acc, &k| acc * x + k)) };
        let d = coeffs.len() - 1;
        let m = SpectralMatrix::from_fn(f, d, vec![1]).unwrap();
        let want = f(u)[[0, 0]];
        prop_assert!((m.eval(u)[[0, 0]] - want).norm() <= 1e-10 * want.norm().max(1.0));
        prop_assert!((m.leading()[[0, 0]] - coeffs[d]).norm() < 1e-10);
    }

    #[test]
    fn level_grouping_conserves_states(vals in proptest::collection::vec(-5i32..5, 1..20)) {
        let zs: Vec<C64> = vals.iter().map(|&v| re(v as f64)).collect();
        let levels = group_levels(&zs, 1e-9);
        prop_assert_eq!(levels.iter().map(|l| l.1).sum::<usize>(), zs.len());
        let mut distinct = vals.clone();
        distinct.sort_unstable();
        distinct.dedup();
        prop_assert_eq!(levels.len(), distinct.len());
    }

    #[test]
    fn twelve_digit_rounding_is_close_and_idempotent(x in -1e6..1e6f64) {
        let r = round12(x);
        prop_assert!((r - x).abs() <= 1e-11 * x.abs());
        prop_assert_eq!(round12(r), r);
    }
}
