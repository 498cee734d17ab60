use edgeflow::linalg::{c, cr, eigvalsh, max_abs};
use edgeflow::local_model::*;
use edgeflow::toeplitz::{truncate, BlockSymbol};
use edgeflow::{CMat, Error, C64};
use proptest::prelude::*;

/// `(T_N − E)ψ` split into per-site 4-vectors.
fn block_residuals(p: &LocalModelParams, psi: &[C64], sites: usize) -> Vec<f64> {
    let t = truncate(&BlockSymbol::local(p), sites).unwrap();
    let v = CMat::from_column_slice(4 * sites, 1, psi);
    let r = &t.matrix * &v - &v * cr(p.e);
    (0..sites).map(|s| r.rows(4 * s, 4).norm()).collect()
}

fn params() -> impl Strategy<Value = (f64, C64, C64)> {
    (
        -1.5f64..1.5,
        (-1.5f64..1.5, -1.5f64..1.5),
        (0.05f64..0.95, 0.0f64..std::f64::consts::TAU),
    )
        .prop_map(|(a, (br, bi), (r, th))| (a, c(br, bi), C64::from_polar(r, th)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn transfer_recurrence_solves_the_half_line_equation(
        (a, b, cc) in params(),
        e in -2.0f64..2.0,
    ) {
        let p = LocalModelParams::new(a, b, cc).at_energy(e);
        let r = transfer_matrix(&p).unwrap();
        let sites = 5;
        for start in initial_span(&p) {
            let mut cur = CMat::from_column_slice(4, 1, &start);
            let mut psi: Vec<C64> = Vec::new();
            for _ in 0..sites {
                psi.extend(cur.iter().copied());
                cur = &r * &cur;
            }
            let scale = psi.iter().map(|z| z.norm()).fold(1.0, f64::max);
            let res = block_residuals(&p, &psi, sites);
            for (s, v) in res.iter().enumerate().take(sites - 1) {
                prop_assert!(*v <= 1e-10 * scale, "site {} residual {:e}", s + 1, v);
            }
        }
    }

    #[test]
    fn transfer_roots_solve_the_quadratic((a, b, cc) in params(), e in -2.0f64..2.0) {
        let p = LocalModelParams::new(a, b, cc).at_energy(e);
        let s = cr(p.mass2() + p.c.norm_sqr() + 1.0 - e * e);
        for l in transfer_roots(&p).unwrap() {
            let q = p.c.conj() * l * l - s * l + p.c;
            prop_assert!(q.norm() <= 1e-10 * (1.0 + l.norm_sqr()) * (1.0 + s.norm()));
        }
        // Each root is a double eigenvalue of R.
        let r = transfer_matrix(&p).unwrap();
        let id = CMat::identity(4, 4);
        for l in transfer_roots(&p).unwrap() {
            let m = &r - &id * l;
            let det = m.determinant();
            prop_assert!(det.norm() <= 1e-8 * (1.0 + max_abs(&r)).powi(4));
        }
    }

    #[test]
    fn edge_branch_vector_is_an_eigenvector((a, b, cc) in params(), upper in any::<bool>()) {
        let p0 = LocalModelParams::new(a, b, cc);
        let e = if upper { 1.0 } else { -1.0 } * p0.mass2().sqrt();
        let p = p0.at_energy(e);
        prop_assume!(e.abs() > 1e-6);
        let k = kernel_classification(&p).unwrap();
        prop_assert_eq!(k.kind, KernelKind::Dim1);
        prop_assert_eq!(k.clause, Clause::EdgeBranch);
        let sites = 30;
        let psi = k.basis[0].truncated(sites);
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let res = block_residuals(&p, &psi, sites);
        for v in res.iter().take(sites - 1) {
            prop_assert!(*v <= 1e-12 * norm);
        }
        // The only defect sits at the cut and decays like |c|^N.
        prop_assert!(res[sites - 1] <= 2.0 * norm * cc.norm().powi(sites as i32 - 1) + 1e-12);
    }

    #[test]
    fn outside_the_disk_there_is_no_edge_state(
        (a, b, cc) in params(),
        grow in 1.1f64..3.0,
    ) {
        let p0 = LocalModelParams::new(a, b, cc * (grow / cc.norm()));
        let p = p0.at_energy(p0.mass2().sqrt());
        prop_assume!(p.e > 1e-6);
        let k = kernel_classification(&p).unwrap();
        prop_assert_eq!(k.kind, KernelKind::NoSolution);
    }

    #[test]
    fn off_branch_energies_have_no_edge_state((a, b, cc) in params(), shift in 0.01f64..0.5) {
        let p0 = LocalModelParams::new(a, b, cc);
        let p = p0.at_energy(p0.mass2().sqrt() + shift);
        let k = kernel_classification(&p).unwrap();
        prop_assert!(matches!(k.kind, KernelKind::NoSolution));
    }
}

#[test]
fn zero_mode_pair_has_two_decaying_states() {
    let p = LocalModelParams::new(0.0, cr(0.0), c(0.3, -0.4));
    let k = kernel_classification(&p).unwrap();
    assert_eq!(k.kind, KernelKind::Dim2);
    assert_eq!(k.kind.dimension(), Some(2));
    for v in &k.basis {
        let psi = v.truncated(40);
        let res = block_residuals(&p, &psi, 40);
        assert!(res[..39].iter().all(|r| *r <= 1e-14));
        assert!((v.norm_sqr() - 1.0 / (1.0 - 0.25)).abs() < 1e-14);
    }
}

#[test]
fn flat_band_at_c_zero_is_infinite_dimensional() {
    let p0 = LocalModelParams::new(0.4, c(0.3, 0.0), cr(0.0));
    let e = (p0.mass2() + 1.0).sqrt();
    let k = kernel_classification(&p0.at_energy(-e)).unwrap();
    assert_eq!(k.kind, KernelKind::InfiniteDim);
    assert_eq!(k.kind.dimension(), None);
    // The bulk band is flat there: every momentum has ±sqrt(m2 + 1) in its spectrum.
    for kk in [0.0, 1.0, 2.5] {
        let ev = eigvalsh(&h_loc(&p0, kk));
        assert!(ev.iter().any(|l| (l + e).abs() < 1e-12));
    }
}

#[test]
fn b_zero_branch_picks_the_matching_basis_vector() {
    let p0 = LocalModelParams::new(0.7, cr(0.0), cr(0.5));
    let up = kernel_classification(&p0.at_energy(0.7)).unwrap();
    assert_eq!(up.basis[0].amplitude[0], cr(1.0));
    let down = kernel_classification(&p0.at_energy(-0.7)).unwrap();
    assert_eq!(down.basis[0].amplitude[3], cr(1.0));
}

#[test]
fn unit_circle_is_boundary_degenerate() {
    let p = LocalModelParams::new(0.0, cr(0.0), cr(1.0));
    assert!(matches!(
        kernel_classification(&p),
        Err(Error::BoundaryDegenerate { .. })
    ));
}

#[test]
fn bloch_hamiltonian_is_hermitian_with_listed_blocks() {
    let p = LocalModelParams::new(0.2, c(0.3, -0.1), c(0.5, 0.2));
    let h = h_loc(&p, 0.9);
    assert!(max_abs(&(&h - h.adjoint())) < 1e-15);
    let a = a_block();
    assert_eq!(a[(0, 1)], cr(-1.0));
    assert_eq!(a[(3, 2)], cr(1.0));
    assert_eq!(a.iter().filter(|z| z.norm() > 0.0).count(), 2);
    // Spectrum of the effective block is ±sqrt(a² + |b|²).
    let ev = eigvalsh(&effective_hamiltonian(p.a, p.b));
    assert!((ev[1] - p.mass2().sqrt()).abs() < 1e-14);
}
