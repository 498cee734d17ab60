//! Closed-form spectral theory of the 4×4 local edge model.
//!
//! The bulk symbol is
//!
//! ```text
//! H(k) = ⎡ a          c̄ − e^{ik}   0            b̄  ⎤
//!        ⎢ c − e^{−ik}  −a          b̄            0  ⎥
//!        ⎢ 0            b           a     −c + e^{−ik}⎥
//!        ⎣ b            0   −c̄ + e^{ik}        −a  ⎦
//! ```
//!
//! i.e. `H(k) = V + A e^{ik} + A† e^{−ik}`. The half-line operator acts as
//! `(H♯ψ)(n) = Aψ(n−1) + Vψ(n) + A†ψ(n+1)` with `ψ(0) = 0`.

use serde::{Deserialize, Serialize};

use crate::linalg::{cis, cr, from_rows, CMat, C64};
use crate::{Error, Result};

/// Tolerance on the defining equations of each kernel clause.
pub const CLAUSE_TOL: f64 = 1e-12;
/// Distance of `|c|` from 1 below which classification is refused.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalModelParams {
    pub a: f64,
    pub b: C64,
    pub c: C64,
    /// Probe energy `E`.
    pub e: f64,
}

impl LocalModelParams {
    pub fn new(a: f64, b: C64, c: C64) -> Self {
        Self { a, b, c, e: 0.0 }
    }

    pub fn at_energy(self, e: f64) -> Self {
        Self { e, ..self }
    }

    /// `a² + |b|²`, the squared edge energy.
    pub fn mass2(&self) -> f64 {
        self.a * self.a + self.b.norm_sqr()
    }
}

/// `V`, the on-site block of the local model.
pub fn v_block(p: &LocalModelParams) -> CMat {
    let z = cr(0.0);
    let a = cr(p.a);
    let (b, c) = (p.b, p.c);
    from_rows(&[
        &[a, c.conj(), z, b.conj()],
        &[c, -a, b.conj(), z],
        &[z, b, a, -c],
        &[b, z, -c.conj(), -a],
    ])
}

/// `A`, the hopping block multiplying `e^{ik}`.
pub fn a_block() -> CMat {
    let mut m = CMat::zeros(4, 4);
    m[(0, 1)] = cr(-1.0);
    m[(3, 2)] = cr(1.0);
    m
}

pub fn h_loc(p: &LocalModelParams, k: f64) -> CMat {
    let a = a_block();
    v_block(p) + &a * cis(k) + a.adjoint() * cis(-k)
}

/// The transfer matrix `R` with `ψ(n+1) = Rψ(n)` for solutions of `(H♯ − E)ψ = 0`.
pub fn transfer_matrix(p: &LocalModelParams) -> Result<CMat> {
    if p.c.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "transfer matrix needs c != 0".into(),
        ));
    }
    let (a, b, c, e) = (p.a, p.b, p.c, p.e);
    let cb = c.conj();
    let z = cr(0.0);
    let diag = cr(a * a + b.norm_sqr() + 1.0 - e * e) / cb;
    Ok(from_rows(&[
        &[c, cr(-(a + e)), b.conj(), z],
        &[-c * (a - e) / cb, diag, z, -b.conj() * c / cb],
        &[b * c / cb, z, diag, -c * (a + e) / cb],
        &[z, -b, cr(-(a - e)), c],
    ]))
}

/// Roots of `c̄λ² − (a² + |b|² + |c|² + 1 − E²)λ + c = 0`.
pub fn transfer_roots(p: &LocalModelParams) -> Result<[C64; 2]> {
    if p.c.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "quadratic degenerates at c = 0".into(),
        ));
    }
    let qa = p.c.conj();
    let qb = -cr(p.mass2() + p.c.norm_sqr() + 1.0 - p.e * p.e);
    let qc = p.c;
    let disc = (qb * qb - qa * qc * 4.0).sqrt();
    // Pick the numerically stable pairing.
    let s = if (qb.conj() * disc).re >= 0.0 {
        1.0
    } else {
        -1.0
    };
    let q = -(qb + disc * s) * 0.5;
    Ok([q / qa, qc / q])
}

/// Basis of the solution space of `(H♯ − E)ψ = 0` at the first site:
/// `ψ(1) ∈ span{(c̄, −(a−E), b, 0), (0, −b̄, −(a+E), c̄)}`.
pub fn initial_span(p: &LocalModelParams) -> [[C64; 4]; 2] {
    let (a, b, c, e) = (p.a, p.b, p.c, p.e);
    [
        [c.conj(), cr(-(a - e)), b, cr(0.0)],
        [cr(0.0), -b.conj(), cr(-(a + e)), c.conj()],
    ]
}

pub fn discriminant(p: &LocalModelParams) -> f64 {
    let m = p.mass2();
    let r = p.c.norm();
    let e2 = p.e * p.e;
    (m + (r - 1.0).powi(2) - e2) * (m + (r + 1.0).powi(2) - e2)
}

/// `Re(b)σ₁ + Im(b)σ₂ + aσ₃ = [[a, b̄], [b, −a]]`.
pub fn effective_hamiltonian(a: f64, b: C64) -> CMat {
    from_rows(&[&[cr(a), b.conj()], &[b, cr(-a)]])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    NoSolution,
    Dim1,
    Dim2,
    InfiniteDim,
}

/// Which case of the classification produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Clause {
    /// `c = 0` and `E = ±√(a² + |b|² + 1)`: flat band of compactly supported states.
    FlatBand,
    /// `a = b = E = 0`, `|c| < 1`: both `e₁` and `e₄`.
    ZeroModePair,
    /// `|c| < 1`, `E = ±√(a² + |b|²) ≠ 0`: one edge state.
    EdgeBranch,
    None,
}

/// A geometrically decaying vector `ψ(n) = ratio^{n−1} · amplitude`, with `0⁰ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeVector {
    pub amplitude: [C64; 4],
    pub ratio: C64,
}

impl EdgeVector {
    pub fn e1(c: C64) -> Self {
        Self {
            amplitude: [cr(1.0), cr(0.0), cr(0.0), cr(0.0)],
            ratio: c,
        }
    }

    pub fn e4(c: C64) -> Self {
        Self {
            amplitude: [cr(0.0), cr(0.0), cr(0.0), cr(1.0)],
            ratio: c,
        }
    }

    /// Value at site `n ≥ 1`.
    pub fn at(&self, n: usize) -> [C64; 4] {
        assert!(n >= 1, "sites are numbered from 1");
        let f = if n == 1 {
            cr(1.0)
        } else {
            self.ratio.powu((n - 1) as u32)
        };
        self.amplitude.map(|x| x * f)
    }

    /// The first `sites` values stacked into one vector of length `4·sites`.
    pub fn truncated(&self, sites: usize) -> Vec<C64> {
        (1..=sites).flat_map(|n| self.at(n)).collect()
    }

    pub fn norm_sqr(&self) -> f64 {
        let a: f64 = self.amplitude.iter().map(|z| z.norm_sqr()).sum();
        a / (1.0 - self.ratio.norm_sqr())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelClassification {
    pub kind: KernelKind,
    /// Closed-form basis; empty for `NoSolution` and `InfiniteDim`.
    pub basis: Vec<EdgeVector>,
    pub clause: Clause,
}

/// Dimension of `ker(H♯ − E)` on `ℓ²(ℕ, ℂ⁴)` with an explicit basis.
pub fn kernel_classification(p: &LocalModelParams) -> Result<KernelClassification> {
    let tol = CLAUSE_TOL;
    let r = p.c.norm();
    let m2 = p.mass2();
    let edge_energy = m2.sqrt();

    let zero_pair = p.b.norm() <= tol && p.a.abs() <= tol && p.e.abs() <= tol;
    let on_branch = (p.e.abs() - edge_energy).abs() <= tol && edge_energy > tol;
    if (r - 1.0).abs() <= BOUNDARY_TOL && (zero_pair || on_branch) {
        return Err(Error::BoundaryDegenerate { abs_c: r });
    }

    if r <= tol && (p.e.abs() - (m2 + 1.0).sqrt()).abs() <= tol {
        return Ok(KernelClassification {
            kind: KernelKind::InfiniteDim,
            basis: vec![],
            clause: Clause::FlatBand,
        });
    }
    if r < 1.0 && zero_pair {
        return Ok(KernelClassification {
            kind: KernelKind::Dim2,
            basis: vec![EdgeVector::e1(p.c), EdgeVector::e4(p.c)],
            clause: Clause::ZeroModePair,
        });
    }
    if r < 1.0 && on_branch {
        let v = if p.b.norm() > tol {
            let alpha = cr(p.a + p.e) / p.b;
            EdgeVector {
                amplitude: [alpha, cr(0.0), cr(0.0), cr(1.0)],
                ratio: p.c,
            }
        } else if (p.e - p.a).abs() <= tol {
            EdgeVector::e1(p.c)
        } else {
            EdgeVector::e4(p.c)
        };
        return Ok(KernelClassification {
            kind: KernelKind::Dim1,
            basis: vec![v],
            clause: Clause::EdgeBranch,
        });
    }
    Ok(KernelClassification {
        kind: KernelKind::NoSolution,
        basis: vec![],
        clause: Clause::None,
    })
}

impl KernelKind {
    pub fn dimension(&self) -> Option<usize> {
        match self {
            KernelKind::NoSolution => Some(0),
            KernelKind::Dim1 => Some(1),
            KernelKind::Dim2 => Some(2),
            KernelKind::InfiniteDim => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, eigvalsh, max_abs};

    #[test]
    fn zero_params_spectrum() {
        let h = h_loc(&LocalModelParams::new(0.0, cr(0.0), cr(0.0)), 0.0);
        let ev = eigvalsh(&h);
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert_eq!(h[(0, 1)], cr(-1.0));
        assert_eq!(h[(2, 3)], cr(1.0));
    }

    #[test]
    fn transfer_needs_nonzero_c() {
        assert!(transfer_matrix(&LocalModelParams::new(0.3, cr(0.1), cr(0.0))).is_err());
    }

    #[test]
    fn discriminant_values() {
        let p = LocalModelParams::new(0.0, cr(0.0), cr(0.5));
        assert!((discriminant(&p) - 0.5625).abs() < 1e-15);
        let q = LocalModelParams::new(0.0, cr(0.0), cis(0.4));
        assert_eq!(discriminant(&q), 0.0);
        let s = LocalModelParams::new(0.3, c(0.2, -0.5), c(0.1, 0.6));
        let s = s.at_energy(s.mass2().sqrt());
        assert!((discriminant(&s) - (s.c.norm_sqr() - 1.0).powi(2)).abs() < 1e-14);
    }

    #[test]
    fn effective_is_pauli_combination() {
        assert_eq!(effective_hamiltonian(0.0, cr(0.0)), CMat::zeros(2, 2));
        assert_eq!(effective_hamiltonian(1.0, cr(0.0)), crate::linalg::pauli(3));
        let h = effective_hamiltonian(0.3, c(0.4, -0.2));
        let want = crate::linalg::pauli(1) * cr(0.4)
            + crate::linalg::pauli(2) * cr(-0.2)
            + crate::linalg::pauli(3) * cr(0.3);
        assert!(max_abs(&(h - want)) < 1e-15);
    }

    #[test]
    fn worked_classifications() {
        let k = kernel_classification(&LocalModelParams::new(0.0, cr(0.0), cr(0.5))).unwrap();
        assert_eq!(k.kind, KernelKind::Dim2);
        assert_eq!(k.basis[0].at(3), [cr(0.25), cr(0.0), cr(0.0), cr(0.0)]);

        let p = LocalModelParams::new(0.6, cr(0.8), cr(0.3)).at_energy(1.0);
        let k = kernel_classification(&p).unwrap();
        assert_eq!(k.kind, KernelKind::Dim1);
        assert!((k.basis[0].amplitude[0] - cr(2.0)).norm() < 1e-15);
        assert_eq!(k.basis[0].amplitude[3], cr(1.0));

        let p = LocalModelParams::new(0.0, cr(0.0), cr(0.0)).at_energy(1.0);
        assert_eq!(
            kernel_classification(&p).unwrap().kind,
            KernelKind::InfiniteDim
        );

        let p = LocalModelParams::new(0.5, cr(0.0), cr(0.3)).at_energy(-0.5);
        let k = kernel_classification(&p).unwrap();
        assert_eq!(k.kind, KernelKind::Dim1);
        assert_eq!(k.basis[0], EdgeVector::e4(cr(0.3)));
    }

    #[test]
    fn c_zero_uses_zero_power_convention() {
        let v = EdgeVector::e1(cr(0.0));
        assert_eq!(v.at(1)[0], cr(1.0));
        assert_eq!(v.at(2)[0], cr(0.0));
    }

    #[test]
    fn boundary_is_refused() {
        let p = LocalModelParams::new(0.0, cr(0.0), cis(1.0));
        assert!(matches!(
            kernel_classification(&p),
            Err(Error::BoundaryDegenerate { .. })
        ));
    }
}
