//! Standard Clifford representations and the matrix maps built on them.
//!
//! The graded representation `Ŝ⁽²⁾` on `ℂ²` has grading `diag(1, −1)` and
//! generators `σ₁`, `σ₂`. Higher even indices are graded tensor powers, realized
//! on the Kronecker product with generators `γᵢ ⊗ 1` and `ε ⊗ γ′ⱼ`. After the
//! product is formed the basis is stably reordered so that even vectors come
//! first, making the grading exactly `diag(I, −I)`.
//!
//! Ungraded odd representations are read off as the lower-left blocks of the
//! first `2n − 1` generators of `Ŝ⁽²ⁿ⁾` in that basis; this yields `γ₁ = +1`
//! for `Cl₁` and the Pauli matrices for `Cl₃`.

use nalgebra::DMatrix;

use crate::linalg::{cr, kron, max_abs, pauli, CMat, C64};
use crate::{Error, Result};

/// Relation tolerance used by [`GradedCliffordRep::relation_defect`] checks.
pub const RELATION_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct GradedCliffordRep {
    pub n: usize,
    pub dim: usize,
    pub epsilon: CMat,
    pub gammas: Vec<CMat>,
    /// Tensor label of each basis vector: entry `j` is the index in the
    /// `j`-th `Ŝ⁽²⁾` factor.
    pub basis: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UngradedCliffordRep {
    pub n: usize,
    pub dim: usize,
    pub gammas: Vec<CMat>,
}

/// Anything that can feed [`clifford_mu`].
pub trait CliffordRep {
    fn generators(&self) -> &[CMat];
    fn dimension(&self) -> usize;
}

impl CliffordRep for GradedCliffordRep {
    fn generators(&self) -> &[CMat] {
        &self.gammas
    }
    fn dimension(&self) -> usize {
        self.dim
    }
}

impl CliffordRep for UngradedCliffordRep {
    fn generators(&self) -> &[CMat] {
        &self.gammas
    }
    fn dimension(&self) -> usize {
        self.dim
    }
}

fn s2() -> GradedCliffordRep {
    GradedCliffordRep {
        n: 2,
        dim: 2,
        epsilon: pauli(3),
        gammas: vec![pauli(1), pauli(2)],
        basis: vec![vec![0], vec![1]],
    }
}

/// Graded tensor product in the lexicographic Kronecker basis, unsorted.
fn kron_product(a: &GradedCliffordRep, b: &GradedCliffordRep) -> GradedCliffordRep {
    let id_b = CMat::identity(b.dim, b.dim);
    let mut gammas: Vec<CMat> = a.gammas.iter().map(|g| kron(g, &id_b)).collect();
    gammas.extend(b.gammas.iter().map(|g| kron(&a.epsilon, g)));
    let mut basis = Vec::with_capacity(a.dim * b.dim);
    for la in &a.basis {
        for lb in &b.basis {
            let mut l = la.clone();
            l.extend_from_slice(lb);
            basis.push(l);
        }
    }
    GradedCliffordRep {
        n: a.n + b.n,
        dim: a.dim * b.dim,
        epsilon: kron(&a.epsilon, &b.epsilon),
        gammas,
        basis,
    }
}

/// Stable reordering with the `+1` eigenspace of the (diagonal) grading first.
fn even_first(rep: GradedCliffordRep) -> GradedCliffordRep {
    let d = rep.dim;
    let mut order: Vec<usize> = (0..d).filter(|&i| rep.epsilon[(i, i)].re > 0.0).collect();
    order.extend((0..d).filter(|&i| rep.epsilon[(i, i)].re < 0.0));
    let perm = |m: &CMat| CMat::from_fn(d, d, |i, j| m[(order[i], order[j])]);
    GradedCliffordRep {
        n: rep.n,
        dim: d,
        epsilon: perm(&rep.epsilon),
        gammas: rep.gammas.iter().map(perm).collect(),
        basis: order.iter().map(|&i| rep.basis[i].clone()).collect(),
    }
}

/// Graded tensor product `a ⊗̂ b`, with the even-first basis ordering.
pub fn graded_tensor(a: &GradedCliffordRep, b: &GradedCliffordRep) -> GradedCliffordRep {
    even_first(kron_product(a, b))
}

/// The standard graded irreducible representation `Ŝ⁽ⁿ⁾`, `n` even.
pub fn standard_graded_rep(n: usize) -> Result<GradedCliffordRep> {
    if n < 2 || n % 2 != 0 || n > 12 {
        return Err(Error::InvalidArgument(format!(
            "graded representation index must be even with 2 <= n <= 12, got {n}"
        )));
    }
    let mut rep = s2();
    for _ in 1..n / 2 {
        rep = kron_product(&rep, &s2());
    }
    Ok(even_first(rep))
}

/// The standard ungraded irreducible representation of `Cl_n`, `n` odd.
pub fn standard_ungraded_rep(n: usize) -> Result<UngradedCliffordRep> {
    if n % 2 == 0 || n > 11 {
        return Err(Error::InvalidArgument(format!(
            "ungraded representation index must be odd with n <= 11, got {n}"
        )));
    }
    let graded = standard_graded_rep(n + 1)?;
    let h = graded.dim / 2;
    let gammas = graded.gammas[..n]
        .iter()
        .map(|g| g.view((h, 0), (h, h)).into_owned())
        .collect();
    Ok(UngradedCliffordRep { n, dim: h, gammas })
}

/// `μ(x) = Σ xᵢ γᵢ`.
pub fn clifford_mu<R: CliffordRep + ?Sized>(rep: &R, x: &[f64]) -> Result<CMat> {
    let gens = rep.generators();
    if x.len() != gens.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} coordinates, got {}",
            gens.len(),
            x.len()
        )));
    }
    let d = rep.dimension();
    Ok(gens
        .iter()
        .zip(x)
        .fold(CMat::zeros(d, d), |acc, (g, &xi)| acc + g * cr(xi)))
}

/// One suspension step `A cos t − γ sin t`.
pub fn as_suspension(a: &CMat, gamma_next: &CMat, t: f64) -> Result<CMat> {
    if a.shape() != gamma_next.shape() {
        return Err(Error::InvalidArgument("dimension mismatch".into()));
    }
    let anti = (a * gamma_next + gamma_next * a).norm();
    if anti >= 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "generator does not anticommute with the operator: |{{A, γ}}| = {anti:.3e}"
        )));
    }
    Ok(a * cr(t.cos()) - gamma_next * cr(t.sin()))
}

/// Applies [`as_suspension`] once per angle, using `gammas[j]` at step `j`.
pub fn iterated_suspension(a: &CMat, gammas: &[CMat], ts: &[f64]) -> Result<CMat> {
    if ts.len() > gammas.len() {
        return Err(Error::InvalidArgument("more angles than generators".into()));
    }
    ts.iter()
        .zip(gammas)
        .try_fold(a.clone(), |acc, (&t, g)| as_suspension(&acc, g, t))
}

/// Disk coordinates of a point given by iterated suspension angles:
/// `x_j = sin t_j · Π_{l>j} cos t_l`.
pub fn suspension_coordinates(ts: &[f64]) -> Vec<f64> {
    (0..ts.len())
        .map(|j| ts[j].sin() * ts[j + 1..].iter().map(|t| t.cos()).product::<f64>())
        .collect()
}

/// Closed form of the iterated suspension: `√(1 − |x|²) Â − Σ xᵢ γᵢ`.
pub fn suspension_closed_form(a: &CMat, gammas: &[CMat], x: &[f64]) -> CMat {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let mut out = a * cr((1.0 - r2).max(0.0).sqrt());
    for (g, &xi) in gammas.iter().zip(x) {
        out -= g * cr(xi);
    }
    out
}

/// Largest entry of `γᵢγⱼ + γⱼγᵢ − 2δᵢⱼ`.
pub fn relation_defect(gammas: &[CMat]) -> f64 {
    let mut worst = 0.0_f64;
    for (i, gi) in gammas.iter().enumerate() {
        for (j, gj) in gammas.iter().enumerate() {
            let mut anti = gi * gj + gj * gi;
            if i == j {
                anti -= CMat::identity(gi.nrows(), gi.ncols()) * cr(2.0);
            }
            worst = worst.max(max_abs(&anti));
        }
    }
    worst
}

/// Dimension of the commutant of a family of matrices; 1 means irreducible.
pub fn commutant_dimension(mats: &[CMat]) -> usize {
    let d = mats.first().map_or(0, |m| m.nrows());
    if d == 0 {
        return 0;
    }
    let rows = mats.len() * d * d;
    // vec(GX − XG) as a linear map on vec(X).
    let mut lin = DMatrix::<C64>::zeros(rows.max(1), d * d);
    for (k, g) in mats.iter().enumerate() {
        for p in 0..d {
            for q in 0..d {
                let col = p * d + q;
                for i in 0..d {
                    // (G E_pq)_{iq} = G_ip ; (E_pq G)_{pj} = G_qj
                    lin[(k * d * d + i * d + q, col)] += g[(i, p)];
                    lin[(k * d * d + p * d + i, col)] -= g[(q, i)];
                }
            }
        }
    }
    let sv = lin.svd(false, false).singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max).max(1.0);
    sv.iter().filter(|&&s| s < 1e-10 * smax).count() + (d * d).saturating_sub(sv.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::I;

    #[test]
    fn s2_matches_fixed_choice() {
        let r = standard_graded_rep(2).unwrap();
        assert_eq!(r.epsilon, pauli(3));
        assert_eq!(r.gammas[0], pauli(1));
        assert_eq!(r.gammas[1][(0, 1)], -I);
        assert_eq!(r.gammas[1][(1, 0)], I);
    }

    #[test]
    fn rejects_bad_indices() {
        assert!(standard_graded_rep(3).is_err());
        assert!(standard_graded_rep(0).is_err());
        assert!(standard_ungraded_rep(2).is_err());
    }

    #[test]
    fn cl1_is_plus_one() {
        let r = standard_ungraded_rep(1).unwrap();
        assert_eq!(r.dim, 1);
        assert_eq!(r.gammas[0][(0, 0)], cr(1.0));
    }

    #[test]
    fn mu_length_mismatch() {
        let r = standard_graded_rep(4).unwrap();
        assert!(clifford_mu(&r, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn suspension_endpoints() {
        let r = standard_graded_rep(2).unwrap();
        let a = r.epsilon.clone();
        let g = &r.gammas[0];
        assert!(max_abs(&(as_suspension(&a, g, 0.0).unwrap() - &a)) < 1e-15);
        let top = as_suspension(&a, g, std::f64::consts::FRAC_PI_2).unwrap();
        assert!(max_abs(&(top + g)) < 1e-15);
        assert!(as_suspension(&a, &a, 0.3).is_err());
    }
}
