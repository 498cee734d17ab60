//! Fermi points of edge-operator families, their signs, edge indices,
//! spectral flow, class-AI evenness and the bulk-edge identity.
//!
//! An edge family is described by a [`ParamMap`]: a map from a parameter
//! manifold into the local-model parameters `(a, b, c)`. Its Fermi points are
//! the zeros of the sign coordinates with `|c| < 1`:
//!
//! | model   | sign coordinates      | Clifford model        | sign            |
//! |---------|-----------------------|-----------------------|-----------------|
//! | `Chain` | `a`                   | `Cl₁`, `γ₁ = 1`       | `−sgn det J`    |
//! | `Odd`   | `(Re b, Im b, a)`     | `Cl₃`, Pauli matrices | `−sgn det J`    |
//! | `Even`  | `(Re b, Im b)`        | graded `Cl₂`          | `+sgn det J`    |

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::{
    check_ai_symmetry, second_chern_number, BlochFamily, ChernReport, MatrixFn, SectionZero,
};
use crate::clifford::{clifford_mu, standard_graded_rep, standard_ungraded_rep};
use crate::linalg::{eigvalsh, real_det, CMat, C64};
use crate::local_model::{KernelClassification, LocalModelParams};
use crate::manifold::{angle_diff, wrap_angle, Base, Chart};
use crate::toeplitz::{
    auto_mu, end_mode_cluster_tol, low_energy_window, low_energy_window_with, symbol_from_fn,
    truncate, BlockSymbol, DEFAULT_LOC_THRESHOLD,
};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SITES: usize = 60;
pub const DEFAULT_SCAN: usize = 64;
const NEWTON_MAX_ITER: usize = 50;
const DEDUP_RADIUS: f64 = 1e-6;
const C_MARGIN: f64 = 1e-6;
const DET_MIN: f64 = 1e-8;
const STENCIL_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeModel {
    /// Upper 2×2 block of the local model on `ℓ²(ℕ, ℂ²)`.
    Chain,
    /// Full 4×4 local model with three sign coordinates.
    Odd,
    /// Full 4×4 local model with `a ≡ 0` and a graded `Cl₂` structure.
    Even,
}

impl EdgeModel {
    pub fn sign_coordinates(&self, p: &LocalModelParams) -> Vec<f64> {
        match self {
            EdgeModel::Chain => vec![p.a],
            EdgeModel::Odd => vec![p.b.re, p.b.im, p.a],
            EdgeModel::Even => vec![p.b.re, p.b.im],
        }
    }

    /// Indices into `(a, Re b, Im b, Re c, Im c)` of the sign coordinates.
    fn selection(&self) -> &'static [usize] {
        match self {
            EdgeModel::Chain => &[0],
            EdgeModel::Odd => &[1, 2, 0],
            EdgeModel::Even => &[1, 2],
        }
    }

    pub fn count(&self) -> usize {
        self.selection().len()
    }

    /// Sign of a Fermi point from the oriented Jacobian determinant.
    pub fn sign_from_det(&self, det: f64) -> i32 {
        let s = if det > 0.0 { 1 } else { -1 };
        match self {
            EdgeModel::Chain | EdgeModel::Odd => -s,
            EdgeModel::Even => s,
        }
    }

    /// Low-energy block predicted by the standard Clifford model.
    pub fn effective(&self, p: &LocalModelParams) -> CMat {
        let x = self.sign_coordinates(p);
        let m = match self {
            EdgeModel::Chain => clifford_mu(&standard_ungraded_rep(1).unwrap(), &x),
            EdgeModel::Odd => clifford_mu(&standard_ungraded_rep(3).unwrap(), &x),
            EdgeModel::Even => clifford_mu(&standard_graded_rep(2).unwrap(), &x),
        };
        m.expect("coordinate count matches the representation")
    }

    pub fn window_rank(&self) -> usize {
        match self {
            EdgeModel::Chain => 1,
            EdgeModel::Odd | EdgeModel::Even => 2,
        }
    }

    pub fn symbol(&self, p: &LocalModelParams) -> BlockSymbol {
        match self {
            EdgeModel::Chain => BlockSymbol::chain(p),
            EdgeModel::Odd | EdgeModel::Even => BlockSymbol::local(p),
        }
    }
}

pub type ParamFn = Arc<dyn Fn(&[f64]) -> LocalModelParams + Send + Sync>;
/// Derivatives of `(a, Re b, Im b, Re c, Im c)` along each point coordinate.
pub type GradFn = Arc<dyn Fn(&[f64]) -> Vec<[f64; 5]> + Send + Sync>;

/// Where the edge symbol at a parameter point comes from.
#[derive(Clone)]
pub enum SymbolSource {
    /// Blocks of the local model at `map(x)`.
    Local,
    /// Local model plus a constant diagonal summand.
    LocalPlusConstant(Vec<f64>),
    /// Fourier blocks, in the last torus direction, of a bulk family
    /// evaluated at `(x, k)`.
    Bulk { rank: usize, eval: MatrixFn },
}

#[derive(Clone)]
pub struct ParamMap {
    pub id: String,
    pub base: Base,
    pub model: EdgeModel,
    map: ParamFn,
    derivative: Option<GradFn>,
    pub symbol: SymbolSource,
    /// Window radius preferred by the catalog entry.
    pub window: Option<f64>,
}

impl std::fmt::Debug for ParamMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParamMap")
            .field("id", &self.id)
            .field("base", &self.base)
            .field("model", &self.model)
            .field("analytic", &self.derivative.is_some())
            .finish_non_exhaustive()
    }
}

impl ParamMap {
    pub fn new<F>(id: impl Into<String>, base: Base, model: EdgeModel, map: F) -> Self
    where
        F: Fn(&[f64]) -> LocalModelParams + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            base,
            model,
            map: Arc::new(map),
            derivative: None,
            symbol: SymbolSource::Local,
            window: None,
        }
    }

    pub fn with_derivative<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<[f64; 5]> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(g));
        self
    }

    pub fn without_derivative(mut self) -> Self {
        self.derivative = None;
        self
    }

    pub fn with_window(mut self, mu: f64) -> Self {
        self.window = Some(mu);
        self
    }

    pub fn with_symbol(mut self, s: SymbolSource) -> Self {
        self.symbol = s;
        self
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> LocalModelParams {
        (self.map)(x)
    }

    /// Same family precomposed with the reflection of the first coordinate.
    pub fn reversed(&self) -> Self {
        let base = self.base;
        let map = self.map.clone();
        let derivative = self.derivative.clone().map(|g| {
            let g: GradFn = Arc::new(move |x: &[f64]| {
                let mut rows = g(&base.reflect(x));
                for v in rows[0].iter_mut() {
                    *v = -*v;
                }
                rows
            });
            g
        });
        let symbol = match &self.symbol {
            SymbolSource::Bulk { rank, eval } => {
                let eval = eval.clone();
                let f: MatrixFn = Arc::new(move |k: &[f64]| {
                    let mut kk = k.to_vec();
                    kk[0] = -kk[0];
                    eval(&kk)
                });
                SymbolSource::Bulk {
                    rank: *rank,
                    eval: f,
                }
            }
            other => other.clone(),
        };
        Self {
            id: format!("{}~rev", self.id),
            map: Arc::new(move |x: &[f64]| map(&base.reflect(x))),
            derivative,
            symbol,
            ..self.clone()
        }
    }

    /// Edge symbol at a parameter point.
    pub fn symbol_at(&self, x: &[f64]) -> Result<BlockSymbol> {
        let p = self.eval(x);
        let mut s = match &self.symbol {
            SymbolSource::Local => self.model.symbol(&p),
            SymbolSource::LocalPlusConstant(d) => self.model.symbol(&p).with_constant_block(d),
            SymbolSource::Bulk { rank, eval } => {
                let eval = eval.clone();
                let xs = x.to_vec();
                symbol_from_fn(
                    *rank,
                    move |t| {
                        let mut k = xs.clone();
                        k.push(t);
                        eval(&k)
                    },
                    4,
                )?
            }
        };
        s.source = Some(x.to_vec());
        Ok(s)
    }

    fn residual_in_chart(&self, chart: Chart, u: &[f64]) -> Vec<f64> {
        self.model
            .sign_coordinates(&self.eval(&self.base.to_point(chart, u)))
    }

    fn analytic_jacobian(&self, chart: Chart, u: &[f64]) -> Option<Vec<Vec<f64>>> {
        let g = self.derivative.as_ref()?;
        let x = self.base.to_point(chart, u);
        let grads = g(&x);
        let dx = self.base.chart_derivative(chart, u);
        let d = self.base.dim();
        Some(
            self.model
                .selection()
                .iter()
                .map(|&s| {
                    (0..d)
                        .map(|j| (0..grads.len()).map(|i| grads[i][s] * dx[i][j]).sum())
                        .collect()
                })
                .collect(),
        )
    }

    fn fd_jacobian(&self, chart: Chart, u: &[f64], h: f64) -> Vec<Vec<f64>> {
        let d = self.base.dim();
        let m = self.model.count();
        let mut j = vec![vec![0.0; d]; m];
        for col in 0..d {
            let mut up = u.to_vec();
            let mut um = u.to_vec();
            up[col] += h;
            um[col] -= h;
            let fp = self.residual_in_chart(chart, &up);
            let fm = self.residual_in_chart(chart, &um);
            for row in 0..m {
                j[row][col] = (fp[row] - fm[row]) / (2.0 * h);
            }
        }
        j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobianMethod {
    Analytic,
    CentralDifference,
    /// Analytic when the map provides a derivative.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    pub window_dim: usize,
    pub mu: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermiPoint {
    pub chart: Chart,
    /// Chart coordinates.
    pub coords: Vec<f64>,
    /// Angles on a torus, ambient coordinates on a sphere.
    pub location: Vec<f64>,
    pub sign: i32,
    /// `∂(sign coordinates)/∂(chart coordinates)`, row-major.
    pub jacobian: Vec<Vec<f64>>,
    /// Determinant with respect to an oriented chart.
    pub det: f64,
    pub c_value: C64,
    pub residual: f64,
    pub certification: Option<Certification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignData {
    pub sign: i32,
    pub jacobian: Vec<Vec<f64>>,
    pub det: f64,
}

fn frob(m: &[Vec<f64>]) -> f64 {
    m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// Sign of a Fermi point from the sign-coordinate Jacobian.
pub fn sign_at(pm: &ParamMap, fp: &FermiPoint, method: JacobianMethod) -> Result<SignData> {
    let analytic = match method {
        JacobianMethod::Analytic => {
            Some(pm.analytic_jacobian(fp.chart, &fp.coords).ok_or_else(|| {
                Error::InvalidArgument(format!("{} has no analytic derivative", pm.id))
            })?)
        }
        JacobianMethod::Auto => pm.analytic_jacobian(fp.chart, &fp.coords),
        JacobianMethod::CentralDifference => None,
    };
    let jacobian = match analytic {
        Some(j) => j,
        None => {
            let h = 1e-6;
            let j1 = pm.fd_jacobian(fp.chart, &fp.coords, h);
            let j2 = pm.fd_jacobian(fp.chart, &fp.coords, h / 2.0);
            let diff: Vec<Vec<f64>> = j1
                .iter()
                .zip(&j2)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
                .collect();
            if frob(&diff) > 1e-4 * frob(&j1) {
                return Err(Error::ResolutionInsufficient(format!(
                    "central-difference Jacobian unstable at {:?}",
                    fp.location
                )));
            }
            j2
        }
    };
    let det = real_det(&jacobian) * pm.base.chart_orientation(fp.chart);
    if det.abs() < DET_MIN {
        return Err(Error::NotAFermiPoint {
            location: fp.location.clone(),
            det,
        });
    }
    Ok(SignData {
        sign: pm.model.sign_from_det(det),
        jacobian,
        det,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermiSearch {
    pub points: Vec<FermiPoint>,
    /// Converged zeros discarded because `|c| > 1`.
    pub rejected: usize,
    pub warnings: Vec<String>,
}

struct ChartGrid {
    chart: Chart,
    res: usize,
    lo: f64,
    step: f64,
    periodic: bool,
}

impl ChartGrid {
    fn coords(&self, idx: usize, d: usize) -> Vec<f64> {
        let mut u = vec![0.0; d];
        let mut r = idx;
        for slot in u.iter_mut().rev() {
            *slot = self.lo + (r % self.res) as f64 * self.step;
            r /= self.res;
        }
        u
    }

    fn neighbor(&self, idx: usize, axis: usize, step: isize, d: usize) -> Option<usize> {
        let stride = self.res.pow((d - 1 - axis) as u32);
        let coord = (idx / stride) % self.res;
        let new = coord as isize + step;
        let new = if self.periodic {
            new.rem_euclid(self.res as isize) as usize
        } else if new < 0 || new >= self.res as isize {
            return None;
        } else {
            new as usize
        };
        Some(idx - coord * stride + new * stride)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn solve_square(j: &[Vec<f64>], f: &[f64]) -> Option<Vec<f64>> {
    let d = f.len();
    let m = nalgebra::DMatrix::<f64>::from_fn(d, d, |r, c| j[r][c]);
    let rhs = nalgebra::DVector::<f64>::from_fn(d, |r, _| -f[r]);
    m.lu().solve(&rhs).map(|v| v.iter().copied().collect())
}

/// Newton iteration on the sign coordinates; returns the chart and
/// coordinates of the converged zero.
fn newton(
    pm: &ParamMap,
    chart: Chart,
    u0: &[f64],
    max_step: f64,
) -> Option<(Chart, Vec<f64>, f64)> {
    let mut chart = chart;
    let mut u = u0.to_vec();
    for _ in 0..NEWTON_MAX_ITER {
        let f = pm.residual_in_chart(chart, &u);
        let fnorm = norm(&f);
        if fnorm < 1e-12 {
            return Some((chart, u, fnorm));
        }
        let j = pm
            .analytic_jacobian(chart, &u)
            .unwrap_or_else(|| pm.fd_jacobian(chart, &u, 1e-6));
        let step = solve_square(&j, &f)?;
        let sn = norm(&step);
        if !sn.is_finite() {
            return None;
        }
        let scale = if sn > max_step { max_step / sn } else { 1.0 };
        for (ui, si) in u.iter_mut().zip(&step) {
            *ui += scale * si;
        }
        if let Chart::Graph { .. } = chart {
            if norm(&u) > 0.9 {
                if norm(&u) >= 1.0 {
                    return None;
                }
                let x = pm.base.to_point(chart, &u);
                chart = pm.base.best_chart(&x);
                u = pm.base.to_chart(chart, &x);
            }
        }
        if sn * scale < 1e-15 {
            break;
        }
    }
    let r = norm(&pm.residual_in_chart(chart, &u));
    (r < 1e-10).then_some((chart, u, r))
}

fn grids(base: Base, res: usize) -> Vec<ChartGrid> {
    match base {
        Base::Torus(_) => vec![ChartGrid {
            chart: Chart::Torus,
            res,
            lo: 0.0,
            step: 2.0 * PI / res as f64,
            periodic: true,
        }],
        Base::Sphere(_) => base
            .charts()
            .into_iter()
            .map(|chart| ChartGrid {
                chart,
                res,
                lo: -0.9,
                step: 1.8 / (res - 1) as f64,
                periodic: false,
            })
            .collect(),
    }
}

/// Locates and signs every Fermi point of the family.
pub fn find_fermi_points(pm: &ParamMap, scan_resolution: usize) -> Result<FermiSearch> {
    find_fermi_points_with(pm, scan_resolution, JacobianMethod::Auto)
}

pub fn find_fermi_points_with(
    pm: &ParamMap,
    scan_resolution: usize,
    method: JacobianMethod,
) -> Result<FermiSearch> {
    if scan_resolution < 32 {
        return Err(Error::InvalidArgument(format!(
            "scan resolution must be at least 32, got {scan_resolution}"
        )));
    }
    if pm.model.count() != pm.base.dim() {
        return Err(Error::InvalidArgument(format!(
            "{} sign coordinates on a {}-dimensional base",
            pm.model.count(),
            pm.base.dim()
        )));
    }
    let d = pm.base.dim();
    let mut candidates: Vec<(Chart, Vec<f64>, f64, bool)> = Vec::new();
    for g in grids(pm.base, scan_resolution) {
        let total = g.res.pow(d as u32);
        let vals: Vec<Option<Vec<f64>>> = (0..total)
            .into_par_iter()
            .map(|i| {
                let u = g.coords(i, d);
                (g.periodic || norm(&u) < 0.95).then(|| pm.residual_in_chart(g.chart, &u))
            })
            .collect();
        for i in 0..total {
            let Some(here) = &vals[i] else { continue };
            let hn = norm(here);
            let mut lip = 0.0_f64;
            let mut is_min = true;
            for axis in 0..d {
                for step in [-1, 1] {
                    if let Some(Some(nb)) = g.neighbor(i, axis, step, d).map(|j| &vals[j]) {
                        lip = lip.max(norm(
                            &here.iter().zip(nb).map(|(a, b)| a - b).collect::<Vec<_>>(),
                        ));
                        is_min &= hn <= norm(nb);
                    }
                }
            }
            // A cell whose residual is within one neighbour difference of
            // zero may contain a zero; bare local minima are tried as well.
            if is_min || hn <= lip {
                candidates.push((g.chart, g.coords(i, d), g.step, hn <= lip));
            }
        }
    }

    let refined: Vec<Option<(Chart, Vec<f64>, f64)>> = candidates
        .par_iter()
        .map(|(chart, u, h, _)| newton(pm, *chart, u, 2.0 * h))
        .collect();

    let mut points: Vec<FermiPoint> = Vec::new();
    let mut rejected = 0;
    let mut failed: Vec<Vec<f64>> = Vec::new();
    for (cand, res) in candidates.iter().zip(refined) {
        let Some((chart, u, residual)) = res else {
            if cand.3 {
                failed.push(pm.base.to_point(cand.0, &cand.1));
            }
            continue;
        };
        let x = pm.base.normalize(&pm.base.to_point(chart, &u));
        if points
            .iter()
            .any(|p| pm.base.distance(&p.location, &x) < DEDUP_RADIUS)
        {
            continue;
        }
        let p = pm.eval(&x);
        let abs_c = p.c.norm();
        if (abs_c - 1.0).abs() <= C_MARGIN {
            return Err(Error::BoundaryDegenerate { abs_c });
        }
        if abs_c > 1.0 {
            rejected += 1;
            continue;
        }
        let chart = pm.base.best_chart(&x);
        let coords = match chart {
            Chart::Torus => x.clone(),
            _ => pm.base.to_chart(chart, &x),
        };
        let mut fp = FermiPoint {
            chart,
            coords,
            location: x,
            sign: 0,
            jacobian: vec![],
            det: 0.0,
            c_value: p.c,
            residual,
            certification: None,
        };
        let s = sign_at(pm, &fp, method)?;
        fp.sign = s.sign;
        fp.jacobian = s.jacobian;
        fp.det = s.det;
        points.push(fp);
    }
    // Rejected zeros with |c| > 1 are counted once per distinct location.
    let mut warnings = Vec::new();
    let spacing = 2.0 * PI / scan_resolution as f64;
    let unresolved: Vec<&Vec<f64>> = failed
        .iter()
        .filter(|x| {
            points
                .iter()
                .all(|p| pm.base.distance(&p.location, x) > 3.0 * spacing)
        })
        .collect();
    if !unresolved.is_empty() {
        let head: Vec<String> = unresolved
            .iter()
            .take(5)
            .map(|x| format!("{x:.4?}"))
            .collect();
        warnings.push(format!(
            "{} scan candidates did not converge within {NEWTON_MAX_ITER} Newton steps (first cells: {})",
            unresolved.len(),
            head.join(", ")
        ));
    }
    points.sort_by(|a, b| {
        (a.chart, &a.location)
            .partial_cmp(&(b.chart, &b.location))
            .unwrap()
    });
    Ok(FermiSearch {
        points,
        rejected,
        warnings,
    })
}

/// Checks that the truncated edge operator near a Fermi point has the
/// predicted low-energy block.
pub fn certify_point(
    pm: &ParamMap,
    fp: &FermiPoint,
    n_sites: usize,
    mu: Option<f64>,
) -> Result<Certification> {
    let center_symbol = pm.symbol_at(&fp.location)?;
    let local_mu = auto_mu(&center_symbol);
    let mu = mu.or(pm.window).map_or(local_mu, |m| m.min(local_mu));
    let d = pm.base.dim();
    let mut stencil = vec![fp.coords.clone()];
    let offsets: Vec<(usize, f64)> = if d == 1 {
        vec![(0, 1.0), (0, -1.0), (0, 2.0), (0, -2.0)]
    } else {
        vec![(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)]
    };
    for (axis, s) in offsets {
        let mut u = fp.coords.clone();
        u[axis] += s * STENCIL_STEP;
        stencil.push(u);
    }
    let mut window_dim = 0;
    let mut worst = 0.0_f64;
    let mut tol = 0.0_f64;
    for (idx, u) in stencil.iter().enumerate() {
        let x = pm.base.to_point(fp.chart, u);
        let p = pm.eval(&x);
        let t = truncate(&pm.symbol_at(&x)?, n_sites)?;
        let w = low_energy_window_with(
            &t,
            mu,
            DEFAULT_LOC_THRESHOLD,
            end_mode_cluster_tol(p.c.norm(), n_sites),
        )?;
        let mut got = w.certified_values();
        got.sort_by(f64::total_cmp);
        let want = eigvalsh(&pm.model.effective(&p));
        let here_tol = 10.0 * p.c.norm().powi(n_sites as i32) + 1e-8;
        tol = tol.max(here_tol);
        if idx == 0 {
            window_dim = got.len();
        }
        if got.len() != want.len() {
            return Err(Error::CertificationFailed {
                location: x,
                reason: format!(
                    "window has {} certified states, expected {}",
                    got.len(),
                    want.len()
                ),
            });
        }
        for (g, e) in got.iter().zip(&want) {
            let dev = (g - e).abs();
            worst = worst.max(dev);
            if dev > here_tol {
                return Err(Error::CertificationFailed {
                    location: x,
                    reason: format!(
                        "certified eigenvalue {g} differs from the Clifford model value {e}"
                    ),
                });
            }
        }
    }
    Ok(Certification {
        window_dim,
        mu,
        max_deviation: worst,
        tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOptions {
    pub scan: usize,
    pub n_sites: usize,
    pub mu: Option<f64>,
    pub certify: bool,
    pub method: JacobianMethod,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        Self {
            scan: DEFAULT_SCAN,
            n_sites: DEFAULT_SITES,
            mu: None,
            certify: true,
            method: JacobianMethod::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeIndexReport {
    pub edge_index: i64,
    pub points: Vec<FermiPoint>,
    pub rejected: usize,
    pub warnings: Vec<String>,
}

/// Sum of the Fermi-point signs.
pub fn edge_index(pm: &ParamMap, opts: &EdgeOptions) -> Result<EdgeIndexReport> {
    let search = find_fermi_points_with(pm, opts.scan, opts.method)?;
    let mut points = search.points;
    if opts.certify {
        let certs: Vec<Result<Certification>> = points
            .par_iter()
            .map(|fp| certify_point(pm, fp, opts.n_sites, opts.mu))
            .collect();
        for (fp, c) in points.iter_mut().zip(certs) {
            fp.certification = Some(c?);
        }
    }
    Ok(EdgeIndexReport {
        edge_index: points.iter().map(|p| p.sign as i64).sum(),
        points,
        rejected: search.rejected,
        warnings: search.warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub k0: f64,
    pub k1: f64,
    /// `+1` for a positive-to-negative crossing.
    pub direction: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralFlowReport {
    pub spectral_flow: i64,
    pub crossings: Vec<Crossing>,
    pub samples: usize,
    pub bisections: usize,
    pub mu: f64,
    pub offset: f64,
}

struct FlowTracker<'a> {
    pm: &'a ParamMap,
    n_sites: usize,
    mu: f64,
    bisections: usize,
    crossings: Vec<Crossing>,
}

impl FlowTracker<'_> {
    fn window(&self, k: f64) -> Result<Vec<f64>> {
        let t = truncate(&self.pm.symbol_at(&[k])?, self.n_sites)?;
        let mut v = low_energy_window(&t, self.mu, DEFAULT_LOC_THRESHOLD)?.certified_values();
        v.sort_by(f64::total_cmp);
        Ok(v)
    }

    /// Upper bound on eigenvalue motion between two parameters (Weyl).
    fn motion_bound(&self, k0: f64, k1: f64) -> Result<f64> {
        let s0 = self.pm.symbol_at(&[k0])?;
        let s1 = self.pm.symbol_at(&[k1])?;
        let zero = CMat::zeros(s0.rank, s0.rank);
        let degrees: std::collections::BTreeSet<i32> =
            s0.coeffs.keys().chain(s1.coeffs.keys()).copied().collect();
        Ok(degrees
            .iter()
            .map(|m| (s1.coeffs.get(m).unwrap_or(&zero) - s0.coeffs.get(m).unwrap_or(&zero)).norm())
            .sum())
    }

    fn interval(&mut self, k0: f64, k1: f64, w0: &[f64], w1: &[f64], depth: usize) -> Result<i64> {
        let delta = self.motion_bound(k0, k1)?;
        let near = |w: &[f64]| {
            w.iter()
                .copied()
                .filter(|l| l.abs() <= 2.0 * delta)
                .collect::<Vec<f64>>()
        };
        let (z0, z1) = (near(w0), near(w1));
        if z0.is_empty() && z1.is_empty() {
            return Ok(0);
        }
        let mut ambiguous = z0.len() != z1.len();
        if !ambiguous && z0.len() > 1 {
            let motion = z0
                .iter()
                .zip(&z1)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            let spacing = z0
                .windows(2)
                .chain(z1.windows(2))
                .map(|p| p[1] - p[0])
                .fold(f64::INFINITY, f64::min);
            ambiguous = spacing < 10.0 * motion;
        }
        if ambiguous {
            if depth >= 12 {
                return Err(Error::TrackingFailure {
                    t0: k0,
                    t1: k1,
                    reason: format!("near-zero eigenvalues {z0:?} -> {z1:?} cannot be paired"),
                });
            }
            self.bisections += 1;
            let km = 0.5 * (k0 + k1);
            let wm = self.window(km)?;
            return Ok(self.interval(k0, km, w0, &wm, depth + 1)?
                + self.interval(km, k1, &wm, w1, depth + 1)?);
        }
        let mut total = 0;
        for (a, b) in z0.iter().zip(&z1) {
            let dir = if *a > 0.0 && *b < 0.0 {
                1
            } else if *a < 0.0 && *b > 0.0 {
                -1
            } else {
                0
            };
            if dir != 0 {
                self.crossings.push(Crossing {
                    k0,
                    k1,
                    direction: dir,
                });
                total += dir as i64;
            }
        }
        Ok(total)
    }
}

/// Signed count of certified edge eigenvalues crossing zero around the loop.
pub fn spectral_flow(
    pm: &ParamMap,
    n_sites: usize,
    mu: f64,
    samples: usize,
) -> Result<SpectralFlowReport> {
    if pm.base != Base::Torus(1) {
        return Err(Error::InvalidArgument(
            "spectral flow needs a one-parameter loop".into(),
        ));
    }
    if samples < 4 {
        return Err(Error::InvalidArgument(
            "at least 4 samples are required".into(),
        ));
    }
    let mut tracker = FlowTracker {
        pm,
        n_sites,
        mu,
        bisections: 0,
        crossings: Vec::new(),
    };
    let mut chosen = None;
    for offset in [0.5, 0.25, 0.75, 0.125] {
        let ks: Vec<f64> = (0..samples)
            .map(|j| 2.0 * PI * (j as f64 + offset) / samples as f64)
            .collect();
        let windows: Vec<Result<Vec<f64>>> = ks.par_iter().map(|&k| tracker.window(k)).collect();
        let windows: Vec<Vec<f64>> = windows.into_iter().collect::<Result<_>>()?;
        if windows.iter().flatten().all(|l| l.abs() >= 1e-10) {
            chosen = Some((offset, ks, windows));
            break;
        }
    }
    let (offset, ks, windows) = chosen.ok_or_else(|| Error::TrackingFailure {
        t0: 0.0,
        t1: 2.0 * PI,
        reason: "every sample grid hits an exact zero eigenvalue".into(),
    })?;
    let mut sf = 0;
    for j in 0..samples {
        let (k0, k1) = (
            ks[j],
            if j + 1 < samples {
                ks[j + 1]
            } else {
                ks[0] + 2.0 * PI
            },
        );
        let w1 = &windows[(j + 1) % samples];
        sf += tracker.interval(k0, k1, &windows[j], w1, 0)?;
    }
    Ok(SpectralFlowReport {
        spectral_flow: sf,
        crossings: tracker.crossings,
        samples,
        bisections: tracker.bisections,
        mu,
        offset,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvennessReport {
    pub edge_index: i64,
    /// Index pairs `(i, j)` with `point_j = τ(point_i)`.
    pub pairs: Vec<(usize, usize)>,
    pub points: Vec<FermiPoint>,
    pub symmetry_deviation: f64,
}

/// Largest deviation from `(a, b, c)(−k) = (a, b̄, c̄)(k)` at seeded samples.
pub fn ai_deviation(pm: &ParamMap, samples: usize) -> (f64, Vec<f64>) {
    let d = pm.base.point_len();
    let mut rng = ChaCha8Rng::seed_from_u64(0xA1);
    let mut worst = (0.0, vec![0.0; d]);
    for _ in 0..samples {
        let k: Vec<f64> = (0..d).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        let mk: Vec<f64> = k.iter().map(|x| wrap_angle(-x)).collect();
        let p = pm.eval(&k);
        let q = pm.eval(&mk);
        let dev = (p.a - q.a)
            .abs()
            .max((p.b.conj() - q.b).norm())
            .max((p.c.conj() - q.c).norm());
        if dev > worst.0 {
            worst = (dev, k);
        }
    }
    worst
}

/// Class-AI evenness: Fermi points pair under `k ↦ −k` with equal signs,
/// avoid the eight fixed points, and sum to an even index.
pub fn check_evenness(pm: &ParamMap, scan: usize) -> Result<EvennessReport> {
    if pm.base != Base::Torus(3) {
        return Err(Error::InvalidArgument(
            "evenness check needs a family on T^3".into(),
        ));
    }
    let (dev, at) = ai_deviation(pm, 10_000);
    if dev >= 1e-10 {
        return Err(Error::SymmetryViolation(format!(
            "K A_k K differs from A_(-k) by {dev:.3e} at k = {at:.4?}"
        )));
    }
    let points = find_fermi_points(pm, scan)?.points;
    for p in &points {
        let fixed = p
            .location
            .iter()
            .all(|&t| angle_diff(t, 0.0).abs() < 1e-6 || angle_diff(t, PI).abs() < 1e-6);
        if fixed {
            return Err(Error::SymmetryViolation(format!(
                "Fermi point {:?} is a fixed point of k -> -k",
                p.location
            )));
        }
    }
    let mut pairs = Vec::new();
    let mut used = vec![false; points.len()];
    for i in 0..points.len() {
        if used[i] {
            continue;
        }
        let image = pm
            .base
            .normalize(&points[i].location.iter().map(|x| -x).collect::<Vec<_>>());
        let j = (0..points.len())
            .find(|&j| !used[j] && j != i && pm.base.distance(&points[j].location, &image) < 1e-8)
            .ok_or_else(|| {
                Error::SymmetryViolation(format!(
                    "Fermi point {:?} has no partner at {:?}",
                    points[i].location, image
                ))
            })?;
        if points[i].sign != points[j].sign {
            return Err(Error::SymmetryViolation(format!(
                "paired points {:?} and {:?} carry opposite signs",
                points[i].location, points[j].location
            )));
        }
        used[i] = true;
        used[j] = true;
        pairs.push((i, j));
    }
    let edge_index: i64 = points.iter().map(|p| p.sign as i64).sum();
    if edge_index % 2 != 0 {
        return Err(Error::SymmetryViolation(format!(
            "edge index {edge_index} is odd"
        )));
    }
    Ok(EvennessReport {
        edge_index,
        pairs,
        points,
        symmetry_deviation: dev,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub grid: Option<usize>,
    pub scan: Option<usize>,
    pub n_sites: Option<usize>,
    pub mu: Option<f64>,
    pub samples: Option<usize>,
    pub min_gap: Option<f64>,
    pub chern_quality: Option<f64>,
    pub curvature_raw: Option<f64>,
    pub ai_deviation: Option<f64>,
    pub runtime_seconds: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub params: LocalModelParams,
    pub classification: KernelClassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub schema_version: u32,
    pub family: String,
    pub command: String,
    pub bulk_c2: Option<i64>,
    pub bulk_c2_raw: Option<f64>,
    pub edge_index: Option<i64>,
    pub fermi_points: Vec<FermiPoint>,
    pub spectral_flow: Option<i64>,
    pub evenness_ok: Option<bool>,
    pub bulk_edge_ok: Option<bool>,
    pub local_kernel: Vec<KernelEntry>,
    /// Section zeros behind the bulk `c₂` count.
    pub bulk_zeros: Vec<SectionZero>,
    pub crossings: Vec<Crossing>,
    pub diagnostics: Diagnostics,
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for Failure {
    fn from(e: &Error) -> Self {
        Failure {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl InvariantReport {
    pub fn new(family: impl Into<String>, command: impl Into<String>) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            family: family.into(),
            command: command.into(),
            bulk_c2: None,
            bulk_c2_raw: None,
            edge_index: None,
            fermi_points: Vec::new(),
            spectral_flow: None,
            evenness_ok: None,
            bulk_edge_ok: None,
            local_kernel: Vec::new(),
            bulk_zeros: Vec::new(),
            crossings: Vec::new(),
            diagnostics: Diagnostics::default(),
            failure: None,
        }
    }

    pub fn absorb_chern(&mut self, c: &ChernReport) {
        self.bulk_c2 = Some(c.rounded);
        self.bulk_c2_raw = Some(c.raw);
        self.diagnostics.grid = Some(c.grid);
        self.diagnostics.min_gap = Some(c.min_gap);
        self.diagnostics.chern_quality = Some(c.quality);
        self.diagnostics.curvature_raw = c.curvature_raw;
        self.bulk_zeros = c.zeros.clone();
        self.diagnostics.warnings.extend(c.warnings.iter().cloned());
    }

    pub fn absorb_edge(&mut self, e: &EdgeIndexReport) {
        self.edge_index = Some(e.edge_index);
        self.fermi_points = e.points.clone();
        self.diagnostics.warnings.extend(e.warnings.iter().cloned());
    }
}

/// Bulk `c₂` against the edge index of the induced edge family.
pub fn verify_bulk_edge(
    bulk: &BlochFamily,
    grid: usize,
    scan_resolution: usize,
) -> Result<InvariantReport> {
    verify_bulk_edge_with(
        bulk,
        grid,
        &EdgeOptions {
            scan: scan_resolution,
            ..EdgeOptions::default()
        },
    )
}

pub fn verify_bulk_edge_with(
    bulk: &BlochFamily,
    grid: usize,
    opts: &EdgeOptions,
) -> Result<InvariantReport> {
    let started = Instant::now();
    let ai = check_ai_symmetry(bulk, 10_000);
    if !ai.symmetric {
        return Err(Error::SymmetryViolation(format!(
            "bulk family is not class AI (deviation {:.3e})",
            ai.max_deviation
        )));
    }
    let edge = bulk.edge.as_ref().ok_or_else(|| {
        Error::InvalidArgument(format!(
            "{} has no sign-coordinate map for its edge family",
            bulk.id
        ))
    })?;
    let chern = second_chern_number(bulk, grid)?;
    let e = edge_index(edge, opts)?;
    let mut report = InvariantReport::new(bulk.id.clone(), "verify-bec");
    report.absorb_chern(&chern);
    report.absorb_edge(&e);
    report.bulk_edge_ok = Some(chern.rounded == -e.edge_index);
    report.diagnostics.scan = Some(opts.scan);
    report.diagnostics.n_sites = Some(opts.n_sites);
    report.diagnostics.ai_deviation = Some(ai.max_deviation);
    report.diagnostics.runtime_seconds = Some(started.elapsed().as_secs_f64());
    Ok(report)
}
