//! Small dense complex linear-algebra helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `e^{iθ}`.
#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

pub fn from_rows(rows: &[&[C64]]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Pauli matrix `σ_k`, `k ∈ {1, 2, 3}`; `k = 0` gives the identity.
pub fn pauli(k: usize) -> CMat {
    let z = cr(0.0);
    let o = cr(1.0);
    match k {
        0 => from_rows(&[&[o, z], &[z, o]]),
        1 => from_rows(&[&[z, o], &[o, z]]),
        2 => from_rows(&[&[z, -I], &[I, z]]),
        3 => from_rows(&[&[o, z], &[z, -o]]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Largest entry of `|M − M†|`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Hermitian eigendecomposition with eigenvalues sorted ascending.
/// Columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    // Symmetrize so round-off in the input cannot leak into the solver.
    let h = (m + m.adjoint()) * cr(0.5);
    let (raw_vals, raw_vecs): (Vec<f64>, CMat) = if h.iter().all(|z| z.im == 0.0) {
        // Real symmetric input: the real solver is several times faster.
        let eig = h.map(|z| z.re).symmetric_eigen();
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(cr),
        )
    } else {
        let eig = h.clone().symmetric_eigen();
        let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let vecs = eig.eigenvectors;
        if eigenpairs_accurate(&h, &vals, &vecs) {
            (vals, vecs)
        } else {
            // The complex solver occasionally returns an eigenvector that
            // leaves its eigenspace inside exactly degenerate clusters. The
            // real symmetric embedding does not have this problem.
            eigh_via_real_embedding(&h).unwrap_or((vals, vecs))
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw_vals[i].total_cmp(&raw_vals[j]));
    let vals = order.iter().map(|&i| raw_vals[i]).collect();
    let vecs = CMat::from_fn(n, n, |r, col| raw_vecs[(r, order[col])]);
    (vals, vecs)
}

fn eigenpairs_accurate(h: &CMat, vals: &[f64], vecs: &CMat) -> bool {
    let n = h.nrows();
    let scale = max_abs(h).max(1.0) * (n.max(1) as f64);
    let tol = 1e-12 * scale;
    let hv = h * vecs;
    (0..n).all(|j| (hv.column(j) - vecs.column(j) * cr(vals[j])).norm() <= tol)
}

/// Diagonalizes the Hermitian `h = A + iB` through the real symmetric matrix
/// `[[A, -B], [B, A]]`. Each eigenvalue of `h` appears twice there, with real
/// eigenvectors `(x, y)` and `(-y, x)` that both map to multiples of `x + iy`.
/// Within each cluster the complex candidates are orthonormalized and the
/// first linearly independent half is kept. Returns `None` when a cluster
/// does not split into exact pairs.
fn eigh_via_real_embedding(h: &CMat) -> Option<(Vec<f64>, CMat)> {
    let n = h.nrows();
    let big = DMatrix::<f64>::from_fn(2 * n, 2 * n, |r, col| {
        let z = h[(r % n, col % n)];
        match (r < n, col < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = big.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let spread = 1e-10 * max_abs(h).max(1.0);
    let mut vals = Vec::with_capacity(n);
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(n);
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len()
            && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] <= spread
        {
            end += 1;
        }
        let want = (end - start) / 2;
        let mut basis: Vec<DVector<C64>> = Vec::with_capacity(want);
        for &idx in &order[start..end] {
            if basis.len() == want {
                break;
            }
            let col = eig.eigenvectors.column(idx);
            let mut z = DVector::<C64>::from_fn(n, |r, _| c(col[r], col[r + n]));
            for _ in 0..2 {
                for b in &basis {
                    let overlap = b.dotc(&z);
                    z -= b * overlap;
                }
            }
            let norm = z.norm();
            if norm > 0.5 {
                basis.push(z / cr(norm));
            }
        }
        for (k, z) in basis.into_iter().enumerate() {
            vals.push(eig.eigenvalues[order[start + 2 * k]]);
            cols.push(z);
        }
        start = end;
    }
    if cols.len() != n {
        return None;
    }
    Some((vals, CMat::from_columns(&cols)))
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let h = (m + m.adjoint()) * cr(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(f64::total_cmp);
    s
}

pub fn min_singular_value(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Unitary factor `U` of the polar decomposition `M = U |M|`.
pub fn polar_unitary(m: &CMat) -> CMat {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^T");
    u * vt
}

/// Principal logarithm of a unitary matrix, returned as the anti-Hermitian
/// matrix `iΘ` with spectrum of `Θ` in `(−π, π)`.
///
/// Uses the Cayley transform `K = i(1 − W)(1 + W)⁻¹`, which is Hermitian with
/// eigenvalues `tan(θ/2)`. Eigenvalues of `W` too close to `−1` are rejected.
pub fn unitary_log(w: &CMat) -> Result<CMat> {
    let n = w.nrows();
    let id = CMat::identity(n, n);
    let plus = &id + w;
    let smin = min_singular_value(&plus);
    if smin < 1e-6 {
        return Err(Error::ResolutionInsufficient(format!(
            "plaquette holonomy has an eigenvalue near -1 (|1 + w| = {smin:.2e})"
        )));
    }
    let inv = plus
        .try_inverse()
        .ok_or_else(|| Error::ResolutionInsufficient("singular Cayley transform".into()))?;
    let k = (&id - w) * inv * I;
    let (kap, q) = eigh(&k);
    let theta = CMat::from_diagonal(&CVec::from_iterator(
        n,
        kap.iter().map(|&x| I * (2.0 * x.atan())),
    ));
    Ok(&q * theta * q.adjoint())
}

pub fn real_det(rows: &[Vec<f64>]) -> f64 {
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    DMatrix::<f64>::from_fn(n, n, |i, j| rows[i][j]).determinant()
}

/// Orthonormal columns spanning the eigenvectors with negative eigenvalue.
pub fn negative_frame(vals: &[f64], vecs: &CMat) -> CMat {
    let p = vals.iter().take_while(|&&x| x < 0.0).count();
    vecs.columns(0, p).into_owned()
}
