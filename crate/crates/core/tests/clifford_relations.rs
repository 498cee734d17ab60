use edgeflow::clifford::*;
use edgeflow::linalg::{cr, max_abs};
use edgeflow::CMat;
use proptest::prelude::*;

fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

#[test]
fn graded_reps_satisfy_relations_and_are_irreducible() {
    for n in [2, 4, 6] {
        let rep = standard_graded_rep(n).unwrap();
        assert_eq!(rep.dim, 1 << (n / 2));
        assert_eq!(rep.gammas.len(), n);
        assert!(relation_defect(&rep.gammas) <= RELATION_TOL);
        assert!(max_abs(&(&rep.epsilon * &rep.epsilon - identity(rep.dim))) <= RELATION_TOL);
        for g in &rep.gammas {
            assert!(max_abs(&(&rep.epsilon * g + g * &rep.epsilon)) <= RELATION_TOL);
            assert!(max_abs(&(g - g.adjoint())) <= RELATION_TOL);
        }
        let mut all = rep.gammas.clone();
        all.push(rep.epsilon.clone());
        assert_eq!(
            commutant_dimension(&all),
            1,
            "graded rep n = {n} is reducible"
        );
    }
}

#[test]
fn graded_basis_lists_even_vectors_first() {
    let rep = standard_graded_rep(4).unwrap();
    let half = rep.dim / 2;
    for i in 0..rep.dim {
        let want = if i < half { 1.0 } else { -1.0 };
        assert_eq!(rep.epsilon[(i, i)].re, want);
    }
}

#[test]
fn ungraded_reps_satisfy_relations_and_are_irreducible() {
    for n in [1, 3, 5] {
        let rep = standard_ungraded_rep(n).unwrap();
        assert_eq!(rep.dim, 1 << ((n - 1) / 2));
        assert!(relation_defect(&rep.gammas) <= RELATION_TOL);
        assert_eq!(
            commutant_dimension(&rep.gammas),
            1,
            "ungraded rep n = {n} is reducible"
        );
    }
}

#[test]
fn invalid_rep_indices_are_rejected() {
    assert!(standard_graded_rep(3).is_err());
    assert!(standard_graded_rep(0).is_err());
    assert!(standard_ungraded_rep(2).is_err());
}

#[test]
fn graded_tensor_of_two_s2_matches_standard_rep() {
    let s2 = standard_graded_rep(2).unwrap();
    let t = graded_tensor(&s2, &s2);
    let s4 = standard_graded_rep(4).unwrap();
    assert_eq!(t.dim, s4.dim);
    for (a, b) in t.gammas.iter().zip(&s4.gammas) {
        assert!(max_abs(&(a - b)) == 0.0);
    }
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

proptest! {
    #[test]
    fn mu_squares_to_norm(x in coords(4)) {
        let rep = standard_graded_rep(4).unwrap();
        let m = clifford_mu(&rep, &x).unwrap();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!(max_abs(&(&m * &m - identity(rep.dim) * cr(r2))) <= 1e-12 * (1.0 + r2));
        prop_assert!(max_abs(&(&rep.epsilon * &m + &m * &rep.epsilon)) <= 1e-12);
    }

    #[test]
    fn ungraded_mu_squares_to_norm(x in coords(3)) {
        let rep = standard_ungraded_rep(3).unwrap();
        let m = clifford_mu(&rep, &x).unwrap();
        let r2: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!(max_abs(&(&m * &m - identity(rep.dim) * cr(r2))) <= 1e-12 * (1.0 + r2));
    }

    #[test]
    fn iterated_suspension_matches_closed_form(ts in prop::collection::vec(-1.5f64..1.5, 3)) {
        let rep = standard_graded_rep(4).unwrap();
        let a = rep.gammas[0].clone();
        let gammas = rep.gammas[1..].to_vec();
        let iterated = iterated_suspension(&a, &gammas, &ts).unwrap();
        let x = suspension_coordinates(&ts);
        // The closed form uses the same angles, so both must agree entrywise.
        let closed = suspension_closed_form(&a, &gammas, &x);
        prop_assert!(max_abs(&(&iterated - &closed)) <= 1e-12);
        // Every suspension of a unitary involution stays a unitary involution.
        prop_assert!(max_abs(&(&iterated * &iterated - identity(rep.dim))) <= 1e-12);
    }
}

#[test]
fn mu_rejects_wrong_length() {
    let rep = standard_graded_rep(2).unwrap();
    assert!(clifford_mu(&rep, &[1.0]).is_err());
}

#[test]
fn suspension_requires_anticommuting_generator() {
    let rep = standard_graded_rep(2).unwrap();
    let a = rep.gammas[0].clone();
    assert!(as_suspension(&a, &a, 0.3).is_err());
}
