//! Block Toeplitz edge operators: symbols, truncation and low-energy windows.
//!
//! A symbol `H(k) = Σ_m C_m e^{imk}` defines the half-line operator whose
//! block `(i, j)` is `C_{i−j}`. Truncating to `N` sites introduces a second,
//! unphysical boundary at site `N`; eigenvectors concentrated there are
//! filtered out by their localization weight on the first half of the chain.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bloch::BlochFamily;
use crate::linalg::{cis, cr, eigh, eigvalsh, hermitian_defect, min_singular_value, CMat, C64};
use crate::local_model::{a_block, v_block, LocalModelParams};
use crate::{Error, Result};

/// Number of quadrature points used to extract Fourier blocks.
pub const FOURIER_POINTS: usize = 256;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_TOL: f64 = 1e-7;
pub const DEFAULT_LOC_THRESHOLD: f64 = 0.9;

/// Clustering tolerance for a chain of `n_sites` whose end modes decay like
/// `|c|^n`. The estimate is capped so distinct bulk levels are never merged.
pub fn end_mode_cluster_tol(abs_c: f64, n_sites: usize) -> f64 {
    (10.0 * abs_c.powi(n_sites as i32)).clamp(CLUSTER_TOL, 1e-3)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockSymbol {
    pub rank: usize,
    pub coeffs: BTreeMap<i32, CMat>,
    /// Parameter point the symbol was built at, if any.
    pub source: Option<Vec<f64>>,
}

impl BlockSymbol {
    pub fn new(rank: usize, coeffs: BTreeMap<i32, CMat>) -> Result<Self> {
        for (m, c) in &coeffs {
            if c.nrows() != rank || c.ncols() != rank {
                return Err(Error::InvalidArgument(format!(
                    "coefficient of degree {m} has shape {:?}, expected {rank}x{rank}",
                    c.shape()
                )));
            }
        }
        let s = Self {
            rank,
            coeffs,
            source: None,
        };
        let defect = s.hermitian_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "symbol is not Hermitian: |C_-m - C_m^*| = {defect:.3e}"
            )));
        }
        Ok(s)
    }

    /// Blocks `V`, `A`, `A†` of the 4×4 local model.
    pub fn local(p: &LocalModelParams) -> Self {
        let a = a_block();
        let mut coeffs = BTreeMap::new();
        coeffs.insert(-1, a.adjoint());
        coeffs.insert(0, v_block(p));
        coeffs.insert(1, a);
        Self {
            rank: 4,
            coeffs,
            source: None,
        }
    }

    /// Upper 2×2 block of the local model (the `b = 0` chain):
    /// `[[a, c̄ − e^{ik}], [c − e^{−ik}, −a]]`.
    pub fn chain(p: &LocalModelParams) -> Self {
        let mut c0 = CMat::zeros(2, 2);
        c0[(0, 0)] = cr(p.a);
        c0[(1, 1)] = cr(-p.a);
        c0[(0, 1)] = p.c.conj();
        c0[(1, 0)] = p.c;
        let mut c1 = CMat::zeros(2, 2);
        c1[(0, 1)] = cr(-1.0);
        let mut coeffs = BTreeMap::new();
        coeffs.insert(-1, c1.adjoint());
        coeffs.insert(0, c0);
        coeffs.insert(1, c1);
        Self {
            rank: 2,
            coeffs,
            source: None,
        }
    }

    /// Appends constant diagonal entries (a stabilizing direct summand).
    pub fn with_constant_block(mut self, diag: &[f64]) -> Self {
        if diag.is_empty() {
            return self;
        }
        let r = self.rank + diag.len();
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&m, c)| {
                let mut big = CMat::zeros(r, r);
                big.view_mut((0, 0), (self.rank, self.rank)).copy_from(c);
                if m == 0 {
                    for (i, &d) in diag.iter().enumerate() {
                        big[(self.rank + i, self.rank + i)] = cr(d);
                    }
                }
                (m, big)
            })
            .collect();
        self.coeffs = coeffs;
        self.rank = r;
        self.coeffs.entry(0).or_insert_with(|| CMat::zeros(r, r));
        self
    }

    pub fn max_degree(&self) -> usize {
        self.coeffs
            .keys()
            .map(|m| m.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn eval(&self, k: f64) -> CMat {
        self.coeffs
            .iter()
            .fold(CMat::zeros(self.rank, self.rank), |acc, (&m, c)| {
                acc + c * cis(m as f64 * k)
            })
    }

    /// Largest entry of `C_{−m} − C_m†` over all degrees.
    pub fn hermitian_defect(&self) -> f64 {
        let zero = CMat::zeros(self.rank, self.rank);
        let mut worst = 0.0_f64;
        for (&m, c) in &self.coeffs {
            let partner = self.coeffs.get(&-m).unwrap_or(&zero);
            worst = worst.max(crate::linalg::max_abs(&(partner - c.adjoint())));
        }
        worst
    }
}

/// Fourier blocks of a periodic matrix function `f` by the trapezoidal rule.
pub fn symbol_from_fn<F>(rank: usize, f: F, fourier_cutoff: usize) -> Result<BlockSymbol>
where
    F: Fn(f64) -> CMat,
{
    let n = FOURIER_POINTS;
    let samples: Vec<CMat> = (0..n).map(|j| f(2.0 * PI * j as f64 / n as f64)).collect();
    let half = (n / 2) as i32;
    let mut raw = BTreeMap::new();
    for m in -half + 1..half {
        let mut acc = CMat::zeros(rank, rank);
        for (j, h) in samples.iter().enumerate() {
            acc += h * cis(-(m as f64) * 2.0 * PI * j as f64 / n as f64);
        }
        raw.insert(m, acc / cr(n as f64));
    }
    for (&m, c) in &raw {
        let tail = c.norm();
        if m.unsigned_abs() as usize > fourier_cutoff && tail > 1e-10 {
            return Err(Error::CutoffInsufficient { degree: m, tail });
        }
    }
    let mut coeffs = BTreeMap::new();
    for (&m, c) in &raw {
        if m.unsigned_abs() as usize > fourier_cutoff {
            continue;
        }
        let sym = (c + raw[&-m].adjoint()) * cr(0.5);
        if sym.norm() >= 1e-13 {
            coeffs.insert(m, sym);
        }
    }
    Ok(BlockSymbol {
        rank,
        coeffs,
        source: None,
    })
}

/// Fourier blocks in the last torus direction at fixed transverse momenta.
pub fn symbol_from_bulk(
    family: &BlochFamily,
    k_par: &[f64],
    fourier_cutoff: usize,
) -> Result<BlockSymbol> {
    let d = family.base_dim();
    if k_par.len() + 1 != d {
        return Err(Error::InvalidArgument(format!(
            "expected {} transverse momenta, got {}",
            d - 1,
            k_par.len()
        )));
    }
    let mut k = k_par.to_vec();
    k.push(0.0);
    let mut s = symbol_from_fn(
        family.rank,
        |t| {
            let mut kk = k.clone();
            *kk.last_mut().unwrap() = t;
            family.eval(&kk)
        },
        fourier_cutoff,
    )?;
    s.source = Some(k_par.to_vec());
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FredholmCheck {
    pub fredholm: bool,
    pub min_singular_value: f64,
}

/// The Toeplitz operator is Fredholm iff the symbol is invertible on the circle.
pub fn fredholm_check(symbol: &BlockSymbol, samples: usize) -> FredholmCheck {
    let samples = samples.max(1);
    let smin = (0..samples)
        .map(|j| min_singular_value(&symbol.eval(2.0 * PI * j as f64 / samples as f64)))
        .fold(f64::INFINITY, f64::min);
    FredholmCheck {
        fredholm: smin > 1e-8,
        min_singular_value: smin,
    }
}

/// Smallest `|eigenvalue|` of the symbol over `samples` points of the circle.
pub fn bulk_gap(symbol: &BlockSymbol, samples: usize) -> f64 {
    (0..samples)
        .flat_map(|j| eigvalsh(&symbol.eval(2.0 * PI * j as f64 / samples as f64)))
        .map(f64::abs)
        .fold(f64::INFINITY, f64::min)
}

/// Default window radius: half the bulk gap on a 256-point grid.
pub fn auto_mu(symbol: &BlockSymbol) -> f64 {
    0.5 * bulk_gap(symbol, FOURIER_POINTS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedToeplitz {
    pub symbol: BlockSymbol,
    pub n: usize,
    pub matrix: CMat,
}

pub fn truncate(symbol: &BlockSymbol, n: usize) -> Result<TruncatedToeplitz> {
    if n == 0 || n <= symbol.max_degree() {
        return Err(Error::InvalidArgument(format!(
            "truncation to {n} sites is too small for symbol degree {}",
            symbol.max_degree()
        )));
    }
    let r = symbol.rank;
    let mut m = CMat::zeros(r * n, r * n);
    for i in 0..n {
        for j in 0..n {
            if let Some(c) = symbol.coeffs.get(&(i as i32 - j as i32)) {
                m.view_mut((i * r, j * r), (r, r)).copy_from(c);
            }
        }
    }
    // Force exact Hermiticity: upper triangle mirrors the lower one.
    for i in 0..r * n {
        for j in i + 1..r * n {
            m[(i, j)] = m[(j, i)].conj();
        }
        m[(i, i)] = cr(m[(i, i)].re);
    }
    debug_assert_eq!(hermitian_defect(&m), 0.0);
    Ok(TruncatedToeplitz {
        symbol: symbol.clone(),
        n,
        matrix: m,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindowPair {
    pub eigenvalue: f64,
    pub vector: Vec<C64>,
    /// Fraction of the squared norm on sites `1..=⌈N/2⌉`.
    pub weight: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowEnergyWindow {
    pub mu: f64,
    pub loc_threshold: f64,
    pub pairs: Vec<WindowPair>,
}

impl LowEnergyWindow {
    pub fn certified(&self) -> impl Iterator<Item = &WindowPair> {
        self.pairs.iter().filter(|p| p.certified)
    }

    pub fn certified_values(&self) -> Vec<f64> {
        self.certified().map(|p| p.eigenvalue).collect()
    }
}

fn left_weight(v: &[C64], cut: usize) -> f64 {
    let tot: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let left: f64 = v[..cut].iter().map(|z| z.norm_sqr()).sum();
    left / tot
}

/// Rotates the phase so that the largest component is real and positive.
fn fix_phase(v: &mut [C64]) {
    let big = v.iter().copied().fold(cr(0.0), |acc, z| {
        if z.norm() > acc.norm() + 1e-12 {
            z
        } else {
            acc
        }
    });
    if big.norm() > 0.0 {
        let ph = big.conj() / big.norm();
        v.iter_mut().for_each(|z| *z *= ph);
    }
}

/// All eigenpairs with `|λ| < μ`, annotated and certified by localization.
///
/// Eigenvalues closer than [`CLUSTER_TOL`] are handled as one block: inside
/// it the left-half projector is diagonalized, which separates modes living
/// at the two ends of the truncated chain in a basis-independent way.
pub fn low_energy_window(
    t: &TruncatedToeplitz,
    mu: f64,
    loc_threshold: f64,
) -> Result<LowEnergyWindow> {
    low_energy_window_with(t, mu, loc_threshold, CLUSTER_TOL)
}

/// [`low_energy_window`] with an explicit clustering tolerance. Callers that
/// know the finite-size splitting of end modes (of order `|c|^N` for the local
/// model) pass a tolerance above it so hybridized end pairs are still
/// separated by the projector step.
pub fn low_energy_window_with(
    t: &TruncatedToeplitz,
    mu: f64,
    loc_threshold: f64,
    cluster_tol: f64,
) -> Result<LowEnergyWindow> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "window radius must be positive, got {mu}"
        )));
    }
    let (vals, vecs) = eigh(&t.matrix);
    for &l in &vals {
        if (l.abs() - mu).abs() < 1e-9 {
            return Err(Error::WindowBoundary { eigenvalue: l, mu });
        }
    }
    let dim = t.matrix.nrows();
    let cut = t.symbol.rank * t.n.div_ceil(2);
    let inside: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() < mu).collect();

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &inside {
        match clusters.last_mut() {
            Some(cl) if vals[i] - vals[*cl.last().unwrap()] < cluster_tol => cl.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut pairs = Vec::with_capacity(inside.len());
    for cl in clusters {
        let block = CMat::from_fn(dim, cl.len(), |r, j| vecs[(r, cl[j])]);
        let rotated = if cl.len() == 1 {
            block
        } else {
            let top = block.rows(0, cut);
            let w = top.adjoint() * top;
            let (_, q) = eigh(&w);
            // Most left-localized first.
            let q = CMat::from_fn(q.nrows(), q.ncols(), |r, j| q[(r, q.ncols() - 1 - j)]);
            block * q
        };
        for j in 0..rotated.ncols() {
            let col = rotated.column(j);
            let mut v: Vec<C64> = col.iter().copied().collect();
            fix_phase(&mut v);
            let hv = &t.matrix * &col;
            let eigenvalue = col.dotc(&hv).re / col.norm_squared();
            let weight = left_weight(&v, cut);
            pairs.push(WindowPair {
                eigenvalue,
                vector: v,
                weight,
                certified: weight >= loc_threshold,
            });
        }
    }
    Ok(LowEnergyWindow {
        mu,
        loc_threshold,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn scalar_shift_truncation() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(0, CMat::zeros(1, 1));
        coeffs.insert(1, CMat::identity(1, 1));
        coeffs.insert(-1, CMat::identity(1, 1));
        let s = BlockSymbol::new(1, coeffs).unwrap();
        let t = truncate(&s, 3).unwrap();
        let want = [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(t.matrix[(i, j)], cr(want[i][j]));
            }
        }
    }

    #[test]
    fn local_two_site_blocks() {
        let p = LocalModelParams::new(0.4, C64::new(0.1, 0.2), C64::new(0.3, -0.1));
        let t = truncate(&BlockSymbol::local(&p), 2).unwrap();
        let v = v_block(&p);
        let a = a_block();
        assert_eq!(t.matrix.view((0, 0), (4, 4)), v.view((0, 0), (4, 4)));
        assert_eq!(t.matrix.view((4, 0), (4, 4)), a.view((0, 0), (4, 4)));
        assert_eq!(t.matrix.view((0, 4), (4, 4)).into_owned(), a.adjoint());
    }

    #[test]
    fn truncation_too_short() {
        let s = BlockSymbol::local(&LocalModelParams::new(0.0, cr(0.0), cr(0.5)));
        assert!(truncate(&s, 1).is_err());
    }

    #[test]
    fn non_hermitian_symbol_rejected() {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1, CMat::identity(1, 1));
        assert!(BlockSymbol::new(1, coeffs).is_err());
    }

    #[test]
    fn constant_symbol_fourier() {
        let m = crate::linalg::pauli(3);
        let s = symbol_from_fn(2, |_| m.clone(), 2).unwrap();
        assert_eq!(s.coeffs.len(), 1);
        assert!(max_abs(&(&s.coeffs[&0] - &m)) < 1e-15);
    }

    #[test]
    fn cutoff_tail_detected() {
        let f = |k: f64| {
            let mut m = CMat::zeros(1, 1);
            m[(0, 0)] = cr((3.0 * k).cos());
            m
        };
        assert!(matches!(
            symbol_from_fn(1, f, 2),
            Err(Error::CutoffInsufficient { .. })
        ));
        assert!(symbol_from_fn(1, f, 3).is_ok());
    }

    #[test]
    fn window_rejects_nonpositive_mu() {
        let s = BlockSymbol::local(&LocalModelParams::new(2.0, cr(0.0), cr(0.0)));
        let t = truncate(&s, 10).unwrap();
        assert!(low_energy_window(&t, 0.0, 0.9).is_err());
    }
}
