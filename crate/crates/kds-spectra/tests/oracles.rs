//! Public-API results against independently written oracles.

use kds_spectra::bichar_flow::trapped_set_locate;
use kds_spectra::constraints::{random_tt, sup_sym, tt_project, TorusGrid};
use kds_spectra::ds_model::{build_operator, indicial_operator, scp_criterion};
use kds_spectra::metric_family::{find_horizons, ricci_fd, BlackHoleParams, Chart, Kds};
use kds_spectra::numeric::exact::Q;
use kds_spectra::numeric::roots::poly_roots;
use kds_spectra::symbol_calculus::{radial_subpr_eigenvalues, trapped_charpoly, vector_l1_identity, TrappedParams};
use proptest::prelude::*;

/// Real roots of `r³ + p r + q` with three real roots, ascending.
fn depressed_cubic(p: f64, q: f64) -> [f64; 3] {
    let k = 2.0 * (-p / 3.0).sqrt();
    let phi = (3.0 * q / (p * k)).acos() / 3.0;
    let mut r = [0, 1, 2].map(|j| k * (phi - 2.0 * std::f64::consts::PI * j as f64 / 3.0).cos());
    r.sort_by(f64::total_cmp);
    r
}

/// `(Λ, M)` with `9ΛM²` in `[0.05, 0.9]`.
fn subextremal() -> impl Strategy<Value = (f64, f64)> {
    (0.2f64..5.0, 0.05f64..0.9).prop_map(|(lam, x)| (lam, (x / (9.0 * lam)).sqrt()))
}

/// Multiplies out `∏(λ − rᵢ)`, descending coefficients.
fn expand(roots: &[f64]) -> Vec<f64> {
    let mut c = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, &a) in c.iter().enumerate() {
            next[k] += a;
            next[k + 1] -= r * a;
        }
        c = next;
    }
    c
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn horizons_are_the_upper_cubic_roots((lam, m) in subextremal()) {
        let h = find_horizons(&BlackHoleParams::sds(lam, m)).unwrap();
        let [neg, rm, rp] = depressed_cubic(-3.0 / lam, 6.0 * m / lam);
        prop_assert!(neg < 0.0);
        prop_assert!((h.r_minus - rm).abs() < 1e-10 * rp);
        prop_assert!((h.r_plus - rp).abs() < 1e-10 * rp);
        let kappa = |r: f64| (m / (r * r) - lam * r / 3.0).abs();
        prop_assert!((h.kappa_minus - kappa(rm)).abs() < 1e-9 * kappa(rm).max(1.0));
        prop_assert!((h.kappa_plus - kappa(rp)).abs() < 1e-9 * kappa(rp).max(1.0));
        prop_assert!((h.beta_minus * h.kappa_minus - 1.0).abs() < 1e-10);
        prop_assert!((h.beta_plus * h.kappa_plus - 1.0).abs() < 1e-10);
    }

    #[test]
    fn photon_sphere_is_three_m((lam, m) in subextremal()) {
        let k = Kds::new(BlackHoleParams::sds(lam, m)).unwrap();
        let rp = trapped_set_locate(&k).unwrap();
        prop_assert!((rp - 3.0 * m).abs() < 1e-12 * m);
    }

    #[test]
    fn l1_constant_is_minus_six_m((lam, m) in subextremal()) {
        let h = find_horizons(&BlackHoleParams::sds(lam, m)).unwrap();
        let grid: Vec<f64> = (0..8).map(|i| h.r_minus + (h.r_plus - h.r_minus) * (i as f64 + 0.5) / 8.0).collect();
        let rep = vector_l1_identity(lam, m, &grid).unwrap();
        prop_assert!((rep.c + 6.0 * m).abs() < 1e-10 * m.max(1.0), "C = {}", rep.c);
    }

    #[test]
    fn radial_eigenvalues_match_closed_form(
        g1 in 0.0f64..4.0, g2 in 0.0f64..4.0, kappa in 0.05f64..2.0, cpm in -5.0f64..5.0, plus in any::<bool>()
    ) {
        let mut got = radial_subpr_eigenvalues(g1, g2, kappa, cpm, if plus { 1.0 } else { -1.0 });
        let mut want = vec![2.0 * g1, 4.0 * kappa, 2.0 * kappa + g1, 8.0 * kappa, 6.0 * kappa, 4.0 * kappa + g2, 4.0 * kappa];
        got.sort_by(f64::total_cmp);
        want.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() < 1e-10);
            prop_assert!(*a >= 0.0);
        }
    }

    #[test]
    fn trapped_charpoly_is_free_of_fprime(
        g1 in -1.0f64..1.0, g2 in -1.0f64..1.0, r in 0.2f64..1.0, alpha in 0.5f64..1.0,
        sigma in 0.5f64..3.0, f1 in -5.0f64..5.0, f2 in -5.0f64..5.0,
    ) {
        let p = TrappedParams { gamma1: g1, gamma2: g2, r, alpha, sigma, fprime: f1 };
        let (a, b) = (g1 * r / (alpha * alpha), g2 * r / (alpha * alpha));
        let want = expand(&[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, a, a, 2.0 * a, 2.0 * b]);
        let scale = want.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        let got = trapped_charpoly(&p);
        let other = trapped_charpoly(&TrappedParams { fprime: f2, ..p });
        for ((x, y), z) in got.iter().zip(&want).zip(&other) {
            prop_assert!((x - y).abs() < 1e-10 * scale);
            prop_assert!((x - z).abs() < 1e-10 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    /// The closed-form criterion against the numerical roots of `det I(σ)`.
    /// Odd multiples of 1/8 stay off the boundary of the criterion for n = 3.
    #[test]
    fn scp_criterion_matches_indicial_roots(k1 in -30i64..30, k2 in -30i64..30) {
        let g1 = Q::new((2 * k1 + 1).into(), 8.into());
        let g2 = Q::new((2 * k2 + 1).into(), 8.into());
        let op = build_operator("boxCPmod", 3, Some((g1.clone(), g2.clone()))).unwrap();
        let roots = poly_roots(&indicial_operator(&op).det_sigma().to_c64());
        let stable = roots.iter().all(|s| s.im < -1e-9);
        prop_assert_eq!(stable, scp_criterion(3, &g1, &g2), "roots {:?}", roots);
    }

    #[test]
    fn kerr_de_sitter_is_einstein(a in 0.0f64..0.003, s in 0.1f64..0.9, theta in 0.3f64..2.8, phi in 0.0f64..6.2) {
        let b = BlackHoleParams::kds(3.0, 0.1, a);
        let h = find_horizons(&b).unwrap();
        let r = h.r_minus + 0.05 + (h.r_plus - h.r_minus - 0.1) * s;
        let k = Kds::new(b).unwrap();
        for chart in [Chart::Star, Chart::BoyerLindquist] {
            let rep = ricci_fd(&k, chart, [0.0, r, theta, phi], 1e-3).unwrap();
            prop_assert!(rep.residual_max < 1e-5, "{:?}: {}", chart, rep.residual_max);
        }
    }
}

#[test]
fn tt_projection_is_idempotent_and_transverse() {
    let grid = TorusGrid::new(12).unwrap();
    let q = random_tt(&grid, 5, 2, 0.1);
    let div = grid.flat_divergence(&q);
    let div_max = div.iter().flat_map(|v| v.iter()).fold(0.0f64, |m, x| m.max(x.abs()));
    assert!(div_max < 1e-10, "{div_max}");
    assert!(q.iter().map(|m| m.trace().abs()).fold(0.0, f64::max) < 1e-12);
    let again = tt_project(&grid, &q);
    let diff: Vec<_> = q.iter().zip(&again).map(|(a, b)| a - b).collect();
    assert!(sup_sym(&diff) < 1e-12);
}
