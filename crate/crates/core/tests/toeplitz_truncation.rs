use std::f64::consts::PI;

use edgeflow::linalg::{c, cis, cr, max_abs};
use edgeflow::local_model::{h_loc, LocalModelParams};
use edgeflow::toeplitz::*;
use edgeflow::{CMat, Error, C64};
use proptest::prelude::*;

/// Fourier block `(1/M) Σ H(k_j) e^{−imk_j}` on a uniform grid.
fn dft_block(p: &LocalModelParams, m: i32) -> CMat {
    let pts = 64;
    let mut acc = CMat::zeros(4, 4);
    for j in 0..pts {
        let k = 2.0 * PI * j as f64 / pts as f64;
        acc += h_loc(p, k) * cis(-(m as f64) * k);
    }
    acc / cr(pts as f64)
}

fn params() -> impl Strategy<Value = LocalModelParams> {
    (
        -1.0f64..1.0,
        -1.0f64..1.0,
        -1.0f64..1.0,
        -0.9f64..0.9,
        -0.9f64..0.9,
    )
        .prop_map(|(a, br, bi, cre, cim)| LocalModelParams::new(a, c(br, bi), c(cre, cim)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_places_fourier_blocks_by_site_difference(p in params(), n in 2usize..9) {
        let t = truncate(&BlockSymbol::local(&p), n).unwrap();
        prop_assert_eq!(t.matrix.nrows(), 4 * n);
        prop_assert_eq!(max_abs(&(&t.matrix - t.matrix.adjoint())), 0.0);
        for i in 0..n {
            for j in 0..n {
                let m = i as i32 - j as i32;
                let want = if m.abs() <= 1 { dft_block(&p, m) } else { CMat::zeros(4, 4) };
                let got = t.matrix.view((4 * i, 4 * j), (4, 4)).into_owned();
                prop_assert!(max_abs(&(got - want)) < 1e-13);
            }
        }
    }

    #[test]
    fn symbol_from_samples_recovers_local_blocks(p in params()) {
        let direct = BlockSymbol::local(&p);
        let sampled = symbol_from_fn(4, |k| h_loc(&p, k), 4).unwrap();
        for k in [0.0, 0.7, 2.9, 5.1] {
            prop_assert!(max_abs(&(direct.eval(k) - sampled.eval(k))) < 1e-12);
        }
        prop_assert!(sampled.hermitian_defect() < 1e-14);
    }
}

#[test]
fn truncation_must_exceed_symbol_degree() {
    let p = LocalModelParams::new(0.0, cr(0.0), cr(0.5));
    assert!(truncate(&BlockSymbol::local(&p), 1).is_err());
    assert!(truncate(&BlockSymbol::local(&p), 0).is_err());
    assert!(truncate(&BlockSymbol::local(&p), 2).is_ok());
}

#[test]
fn high_frequency_symbol_exceeds_cutoff() {
    let f = |k: f64| CMat::from_element(1, 1, cr((7.0 * k).cos()));
    match symbol_from_fn(1, f, 4) {
        Err(Error::CutoffInsufficient { degree, .. }) => assert_eq!(degree.abs(), 7),
        other => panic!("expected a cutoff error, got {other:?}"),
    }
}

#[test]
fn gapless_symbol_is_not_fredholm() {
    // c on the unit circle closes the gap of the local model at a = b = 0.
    let closed = BlockSymbol::local(&LocalModelParams::new(0.0, cr(0.0), cr(1.0)));
    assert!(!fredholm_check(&closed, 256).fredholm);
    let open = BlockSymbol::local(&LocalModelParams::new(0.0, cr(0.0), cr(0.5)));
    let chk = fredholm_check(&open, 256);
    assert!(chk.fredholm);
    assert!((chk.min_singular_value - 0.5).abs() < 1e-12);
    assert!((auto_mu(&open) - 0.25).abs() < 1e-12);
}

#[test]
fn zero_mode_pair_appears_in_the_window_at_the_left_end() {
    let cc = c(0.3, 0.4);
    let p = LocalModelParams::new(0.0, cr(0.0), cc);
    let n = 40;
    let t = truncate(&BlockSymbol::local(&p), n).unwrap();
    let w = low_energy_window(&t, 0.25, DEFAULT_LOC_THRESHOLD).unwrap();
    // Two zero modes at each end; only the left pair is certified.
    assert_eq!(w.pairs.len(), 4);
    let cert: Vec<_> = w.certified().collect();
    assert_eq!(cert.len(), 2);
    let bound = 10.0 * cc.norm().powi(n as i32);
    for pair in &cert {
        assert!(pair.eigenvalue.abs() <= bound);
        assert!(pair.weight >= DEFAULT_LOC_THRESHOLD);
        // The certified vectors lie in span{e1, e4} at every site.
        let off: f64 = pair
            .vector
            .chunks(4)
            .map(|s: &[C64]| s[1].norm_sqr() + s[2].norm_sqr())
            .sum();
        assert!(off < 1e-12);
    }
}

#[test]
fn window_radius_must_be_positive() {
    let p = LocalModelParams::new(0.0, cr(0.0), cr(0.5));
    let t = truncate(&BlockSymbol::local(&p), 10).unwrap();
    assert!(low_energy_window(&t, 0.0, DEFAULT_LOC_THRESHOLD).is_err());
}

#[test]
fn cluster_tolerance_grows_with_end_mode_overlap() {
    assert_eq!(end_mode_cluster_tol(0.1, 60), CLUSTER_TOL);
    let t = end_mode_cluster_tol(0.8, 60);
    assert!((t - 10.0 * 0.8f64.powi(60)).abs() < 1e-18);
    assert_eq!(end_mode_cluster_tol(0.999, 60), 1e-3);
}
