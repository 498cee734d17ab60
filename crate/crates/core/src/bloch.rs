//! Bloch Hamiltonian families, negative-band projectors and the second Chern
//! number of the negative-band bundle over `T⁴`.
//!
//! The integer `c₂` is computed as the signed zero count of a generic section
//! of the negative bundle (reduced to rank 2 by splitting off trivial lines).
//! The zeros are seeded from the lattice, refined by Gauss-Newton and signed
//! by the orientation of the section derivative; the count is exact once all
//! zeros are found and is cross-checked with a second independent section.
//! The plaquette (link-variable) curvature sum is reported alongside as
//! `curvature_raw`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fermi::ParamMap;
use crate::linalg::{
    c, cr, eigh, hermitian_defect, negative_frame, polar_unitary, unitary_log, CMat, CVec,
};
use crate::manifold::{angle_diff, wrap_angle, Base};
use crate::{Error, Result};

pub const GAPLESS_TOL: f64 = 1e-10;

pub type MatrixFn = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;

#[derive(Clone)]
pub struct BlochFamily {
    pub id: String,
    pub base: Base,
    pub rank: usize,
    pub gap_required: bool,
    eval: MatrixFn,
    /// Sign-coordinate map of the induced edge family, when known.
    pub edge: Option<Arc<ParamMap>>,
}

impl std::fmt::Debug for BlochFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlochFamily")
            .field("id", &self.id)
            .field("base", &self.base)
            .field("rank", &self.rank)
            .finish_non_exhaustive()
    }
}

impl BlochFamily {
    pub fn new<F>(id: impl Into<String>, base: Base, rank: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> CMat + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            base,
            rank,
            gap_required: true,
            eval: Arc::new(f),
            edge: None,
        }
    }

    pub fn with_edge(mut self, edge: ParamMap) -> Self {
        self.edge = Some(Arc::new(edge));
        self
    }

    pub fn eval(&self, k: &[f64]) -> CMat {
        (self.eval)(k)
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Precomposes with `k_axis ↦ −k_axis`.
    pub fn reversed(&self, axis: usize) -> Self {
        let inner = self.eval.clone();
        let edge = self
            .edge
            .as_ref()
            .filter(|_| axis == 0)
            .map(|e| Arc::new(e.reversed()));
        Self {
            id: format!("{}~rev{axis}", self.id),
            eval: Arc::new(move |k: &[f64]| {
                let mut kk = k.to_vec();
                kk[axis] = -kk[axis];
                inner(&kk)
            }),
            edge,
            ..self.clone()
        }
    }

    /// Direct sum with a constant diagonal block.
    pub fn direct_sum_constant(&self, diag: &[f64]) -> Self {
        let inner = self.eval.clone();
        let r = self.rank;
        let d = diag.to_vec();
        let total = r + d.len();
        Self {
            id: format!("{}+const", self.id),
            rank: total,
            eval: Arc::new(move |k: &[f64]| {
                let mut m = CMat::zeros(total, total);
                m.view_mut((0, 0), (r, r)).copy_from(&inner(k));
                for (i, &x) in d.iter().enumerate() {
                    m[(r + i, r + i)] = cr(x);
                }
                m
            }),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProjector {
    pub matrix: CMat,
    pub rank: usize,
}

/// Orthogonal projector onto the negative eigenspace of `h`.
pub fn negative_projector(h: &CMat) -> Result<SpectralProjector> {
    let defect = hermitian_defect(h);
    if defect > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "matrix is not Hermitian ({defect:.2e})"
        )));
    }
    let (vals, vecs) = eigh(h);
    if let Some(&l) = vals.iter().find(|l| l.abs() < GAPLESS_TOL) {
        return Err(Error::GaplessInput(format!(
            "eigenvalue {l:.3e} within {GAPLESS_TOL:e} of zero"
        )));
    }
    let psi = negative_frame(&vals, &vecs);
    Ok(SpectralProjector {
        rank: psi.ncols(),
        matrix: &psi * psi.adjoint(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiCheck {
    pub symmetric: bool,
    pub max_deviation: f64,
}

/// Compares `conj(H(k))` with `H(−k)` at seeded random momenta.
pub fn check_ai_symmetry(family: &BlochFamily, samples: usize) -> AiCheck {
    let d = family.base_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let k: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let mk: Vec<f64> = k.iter().map(|x| -x).collect();
        let lhs = family.eval(&k).map(|z| z.conj());
        worst = worst.max(crate::linalg::max_abs(&(lhs - family.eval(&mk))));
    }
    AiCheck {
        symmetric: worst < 1e-10,
        max_deviation: worst,
    }
}

#[derive(Debug, Clone, Default)]
pub struct ChernOptions {
    /// Multiply every lattice frame by a seeded random unitary before the
    /// curvature is assembled.
    pub gauge_seed: Option<u64>,
    /// Skip the plaquette curvature diagnostic.
    pub skip_curvature: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionZero {
    pub k: Vec<f64>,
    pub sign: i32,
    pub det: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChernReport {
    pub raw: f64,
    pub rounded: i64,
    pub quality: f64,
    pub curvature_raw: Option<f64>,
    pub grid: usize,
    pub min_gap: f64,
    pub negative_rank: usize,
    pub zeros: Vec<SectionZero>,
    pub cross_check: i64,
    pub warnings: Vec<String>,
}

fn site_k(idx: usize, grid: usize) -> [f64; 4] {
    let h = 2.0 * PI / grid as f64;
    let mut k = [0.0; 4];
    let mut r = idx;
    for slot in k.iter_mut().rev() {
        *slot = (r % grid) as f64 * h;
        r /= grid;
    }
    k
}

fn shift(idx: usize, axis: usize, step: isize, grid: usize) -> usize {
    let stride = grid.pow(3 - axis as u32);
    let coord = (idx / stride) % grid;
    let new = (coord as isize + step).rem_euclid(grid as isize) as usize;
    idx - coord * stride + new * stride
}

fn random_unitary(rng: &mut ChaCha8Rng, p: usize) -> CMat {
    let m = CMat::from_fn(p, p, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    polar_unitary(&m)
}

fn random_vector(rng: &mut ChaCha8Rng, r: usize) -> CVec {
    CVec::from_fn(r, |_, _| {
        c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

/// Generic section of the negative bundle after splitting off `p − 2`
/// trivial lines: returns `Q(k)v` and an orthonormal frame of `range Q`.
struct Section {
    reductions: Vec<CVec>,
    v: CVec,
}

impl Section {
    fn new(seed: u64, rank: usize, p: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let reductions = (0..p.saturating_sub(2))
            .map(|_| random_vector(&mut rng, rank))
            .collect();
        Self {
            reductions,
            v: random_vector(&mut rng, rank),
        }
    }

    fn projector(&self, psi: &CMat) -> CMat {
        let mut q = psi * psi.adjoint();
        for w in &self.reductions {
            let t = &q * w;
            let n2 = t.norm_squared();
            q -= &t * t.adjoint() / cr(n2);
        }
        q
    }

    fn value(&self, psi: &CMat) -> CVec {
        self.projector(psi) * &self.v
    }
}

fn frame_at(family: &BlochFamily, k: &[f64]) -> (CMat, f64) {
    let (vals, vecs) = eigh(&family.eval(k));
    let gap = vals.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min);
    (negative_frame(&vals, &vecs), gap)
}

fn section_at(family: &BlochFamily, s: &Section, k: &[f64]) -> CVec {
    s.value(&frame_at(family, k).0)
}

fn section_jacobian(family: &BlochFamily, s: &Section, k: &[f64], h: f64) -> Vec<CVec> {
    (0..4)
        .map(|i| {
            let mut kp = k.to_vec();
            let mut km = k.to_vec();
            kp[i] += h;
            km[i] -= h;
            (section_at(family, s, &kp) - section_at(family, s, &km)) / cr(2.0 * h)
        })
        .collect()
}

fn refine_zero(
    family: &BlochFamily,
    s: &Section,
    start: [f64; 4],
    max_step: f64,
) -> Option<Vec<f64>> {
    let mut k = start.to_vec();
    for _ in 0..40 {
        let g = section_at(family, s, &k);
        let gn = g.norm();
        if gn < 1e-12 {
            return Some(k);
        }
        let jac = section_jacobian(family, s, &k, 1e-6);
        let r = g.len();
        let jr = DMatrix::<f64>::from_fn(2 * r, 4, |row, col| {
            let z = jac[col][row % r];
            if row < r {
                z.re
            } else {
                z.im
            }
        });
        let fr = nalgebra::DVector::<f64>::from_fn(2 * r, |row, _| {
            if row < r {
                -g[row].re
            } else {
                -g[row - r].im
            }
        });
        let step = jr.svd(true, true).solve(&fr, 1e-12).ok()?;
        let mut sn = step.norm();
        let scale = if sn > max_step { max_step / sn } else { 1.0 };
        for i in 0..4 {
            k[i] += scale * step[i];
        }
        sn *= scale;
        if sn < 1e-14 {
            break;
        }
    }
    (section_at(family, s, &k).norm() < 1e-10).then_some(k)
}

fn zero_sign(family: &BlochFamily, s: &Section, k: &[f64]) -> (i32, f64) {
    let (psi, _) = frame_at(family, k);
    let (_, q_vecs) = eigh(&s.projector(&psi));
    let n = q_vecs.ncols();
    let frame = q_vecs.columns(n - 2, 2).into_owned();
    let jac = section_jacobian(family, s, k, 1e-6);
    let mut rows = vec![vec![0.0; 4]; 4];
    for (i, dj) in jac.iter().enumerate() {
        let comp = frame.adjoint() * dj;
        rows[0][i] = comp[0].re;
        rows[1][i] = comp[0].im;
        rows[2][i] = comp[1].re;
        rows[3][i] = comp[1].im;
    }
    let det = crate::linalg::real_det(&rows);
    (if det > 0.0 { 1 } else { -1 }, det)
}

fn count_section_zeros(
    family: &BlochFamily,
    grid: usize,
    frames: &[CMat],
    s: &Section,
) -> Result<Vec<SectionZero>> {
    let vals: Vec<CVec> = frames.par_iter().map(|psi| s.value(psi)).collect();
    let h = 2.0 * PI / grid as f64;
    let seeds: Vec<usize> = (0..vals.len())
        .filter(|&i| {
            let here = vals[i].norm();
            let mut lip = 0.0_f64;
            let mut is_min = true;
            for axis in 0..4 {
                for step in [-1, 1] {
                    let j = shift(i, axis, step, grid);
                    lip = lip.max((&vals[i] - &vals[j]).norm());
                    is_min &= here <= vals[j].norm();
                }
            }
            is_min || here <= lip
        })
        .collect();
    let refined: Vec<Option<Vec<f64>>> = seeds
        .par_iter()
        .map(|&i| refine_zero(family, s, site_k(i, grid), h))
        .collect();
    let mut zeros: Vec<SectionZero> = Vec::new();
    for k in refined.into_iter().flatten() {
        let k: Vec<f64> = k.iter().map(|&x| wrap_angle(x)).collect();
        let dup = zeros.iter().any(|z| {
            z.k.iter()
                .zip(&k)
                .map(|(a, b)| angle_diff(*a, *b).powi(2))
                .sum::<f64>()
                .sqrt()
                < 1e-6
        });
        if dup {
            continue;
        }
        let (sign, det) = zero_sign(family, s, &k);
        if det.abs() < 1e-10 {
            return Err(Error::ResolutionInsufficient(format!(
                "section zero at {k:?} is not transverse (det = {det:.2e})"
            )));
        }
        zeros.push(SectionZero { k, sign, det });
    }
    zeros.sort_by(|a, b| a.k.partial_cmp(&b.k).unwrap());
    Ok(zeros)
}

fn plaquette_curvature(frames: &[CMat], grid: usize) -> Result<f64> {
    let n = frames.len();
    let links: Vec<[CMat; 4]> = (0..n)
        .into_par_iter()
        .map(|i| {
            std::array::from_fn(|mu| {
                polar_unitary(&(frames[i].adjoint() * &frames[shift(i, mu, 1, grid)]))
            })
        })
        .collect();
    let per_site: Vec<Result<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut f = vec![vec![None; 4]; 4];
            for mu in 0..4 {
                for nu in mu + 1..4 {
                    let w = &links[i][mu]
                        * &links[shift(i, mu, 1, grid)][nu]
                        * links[shift(i, nu, 1, grid)][mu].adjoint()
                        * links[i][nu].adjoint();
                    f[mu][nu] = Some(unitary_log(&w)?);
                }
            }
            let tr = |a: (usize, usize), b: (usize, usize)| {
                let x = f[a.0][a.1].as_ref().unwrap();
                let y = f[b.0][b.1].as_ref().unwrap();
                (x * y).trace().re
            };
            Ok(2.0 * (tr((0, 1), (2, 3)) - tr((0, 2), (1, 3)) + tr((0, 3), (1, 2))))
        })
        .collect();
    let mut total = 0.0;
    for v in per_site {
        total += v?;
    }
    Ok(total / (8.0 * PI * PI))
}

/// Second Chern number of the negative-band bundle of a gapped family on `T⁴`.
pub fn second_chern_number(family: &BlochFamily, grid: usize) -> Result<ChernReport> {
    second_chern_number_with(family, grid, &ChernOptions::default())
}

pub fn second_chern_number_with(
    family: &BlochFamily,
    grid: usize,
    opts: &ChernOptions,
) -> Result<ChernReport> {
    if family.base != Base::Torus(4) {
        return Err(Error::InvalidArgument(
            "second Chern number needs a family on T^4".into(),
        ));
    }
    if grid < 8 {
        return Err(Error::InvalidArgument(format!(
            "grid must be at least 8, got {grid}"
        )));
    }
    let n = grid.pow(4);
    let sites: Vec<(CMat, f64)> = (0..n)
        .into_par_iter()
        .map(|i| frame_at(family, &site_k(i, grid)))
        .collect();
    let min_gap = sites.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    if min_gap < GAPLESS_TOL {
        let i = sites.iter().position(|s| s.1 < GAPLESS_TOL).unwrap();
        return Err(Error::GaplessInput(format!(
            "gap {min_gap:.3e} at k = {:?}",
            site_k(i, grid)
        )));
    }
    let p = sites[0].0.ncols();
    if sites.iter().any(|s| s.0.ncols() != p) {
        return Err(Error::GaplessInput(
            "number of negative bands varies over the torus".into(),
        ));
    }
    let mut frames: Vec<CMat> = sites.into_iter().map(|s| s.0).collect();
    let mut warnings = Vec::new();

    let (zeros, cross_check) = if p < 2 {
        (Vec::new(), 0)
    } else {
        let primary =
            count_section_zeros(family, grid, &frames, &Section::new(0x5EC7, family.rank, p))?;
        let secondary =
            count_section_zeros(family, grid, &frames, &Section::new(0xC0DE, family.rank, p))?;
        let total = |z: &[SectionZero]| z.iter().map(|z| z.sign as i64).sum::<i64>();
        let (a, b) = (total(&primary), total(&secondary));
        if a != b {
            return Err(Error::ResolutionInsufficient(format!(
                "independent sections disagree ({a} vs {b}); refine the grid"
            )));
        }
        (primary, b)
    };
    let raw: f64 = zeros.iter().map(|z| z.sign as f64).sum();

    let curvature_raw = if opts.skip_curvature || p == 0 {
        None
    } else {
        if let Some(seed) = opts.gauge_seed {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for f in frames.iter_mut() {
                *f = &*f * random_unitary(&mut rng, p);
            }
        }
        match plaquette_curvature(&frames, grid) {
            Ok(v) => Some(v),
            Err(e) => {
                warnings.push(format!("curvature diagnostic unavailable: {e}"));
                None
            }
        }
    };

    let rounded = raw.round() as i64;
    let quality = (raw - rounded as f64).abs();
    if quality > 0.05 {
        warnings.push(format!("|raw - rounded| = {quality:.3} exceeds 0.05"));
    }
    Ok(ChernReport {
        raw,
        rounded,
        quality,
        curvature_raw,
        grid,
        min_gap,
        negative_rank: p,
        zeros,
        cross_check,
        warnings,
    })
}
