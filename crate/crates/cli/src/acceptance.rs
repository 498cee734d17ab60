//! Acceptance suite shared by `edgeflow selftest` and the `acceptance`
//! integration test. Each criterion yields one PASS/FAIL line.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use edgeflow::bloch::{second_chern_number, second_chern_number_with, ChernOptions};
use edgeflow::catalog::{example1_map, hn_bulk, lookup};
use edgeflow::clifford::{
    clifford_mu, commutant_dimension, graded_tensor, iterated_suspension, relation_defect,
    standard_graded_rep, standard_ungraded_rep, suspension_closed_form, suspension_coordinates,
    CliffordRep, RELATION_TOL,
};
use edgeflow::fermi::{check_evenness, edge_index, spectral_flow, EdgeOptions, FermiPoint};
use edgeflow::linalg::{c, max_abs, CMat, C64};
use edgeflow::local_model::{
    a_block, initial_span, kernel_classification, transfer_matrix, v_block, KernelKind,
    LocalModelParams,
};
use edgeflow::manifold::angle_diff;
use edgeflow::toeplitz::{
    auto_mu, end_mode_cluster_tol, low_energy_window_with, truncate, BlockSymbol,
    DEFAULT_LOC_THRESHOLD,
};
use edgeflow::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::parse_args;
use crate::run::run;

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub limit_seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{:>3}] {} ({:.2} s / {:.0} s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.limit_seconds,
            self.detail
        )
    }
}

struct Check {
    ok: bool,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, cond: bool, note: impl Into<String>) {
        let note = note.into();
        if cond {
            self.notes.push(note);
        } else {
            self.ok = false;
            self.notes.push(format!("MISMATCH {note}"));
        }
    }

    fn fail(&mut self, note: impl Into<String>) {
        self.ok = false;
        self.notes.push(format!("ERROR {}", note.into()));
    }
}

fn timed(
    id: &'static str,
    title: &'static str,
    limit_seconds: f64,
    body: impl FnOnce(&mut Check),
) -> CriterionResult {
    let t = Instant::now();
    let mut check = Check::new();
    body(&mut check);
    let seconds = t.elapsed().as_secs_f64();
    if seconds >= limit_seconds {
        check.fail(format!("runtime {seconds:.1} s exceeds {limit_seconds} s"));
    }
    CriterionResult {
        id,
        title,
        pass: check.ok,
        detail: check.notes.join("; "),
        seconds,
        limit_seconds,
    }
}

fn cli(args: &[&str]) -> crate::run::Outcome {
    let mut argv = vec!["edgeflow"];
    argv.extend_from_slice(args);
    let cfg = parse_args(argv).expect("acceptance arguments are valid");
    run(&cfg)
}

/// Integer field of a report, or `none` when it was not computed.
fn opt(v: Option<i64>) -> String {
    v.map_or_else(|| "none".into(), |x| x.to_string())
}

fn torus_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| angle_diff(*a, *b).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Every expected point is matched by exactly one located point.
fn matches_set(points: &[FermiPoint], expected: &[Vec<f64>], tol: f64, torus: bool) -> bool {
    points.len() == expected.len()
        && expected.iter().all(|e| {
            points
                .iter()
                .filter(|p| if torus { torus_distance(&p.location, e) } else { euclid(&p.location, e) } < tol)
                .count()
                == 1
        })
}

pub fn criterion_1() -> CriterionResult {
    timed("1", "spectral flow of example1", 10.0, |ck| {
        let out = cli(&[
            "spectral-flow",
            "--family",
            "example1",
            "--N",
            "60",
            "--samples",
            "512",
        ]);
        match out.report.spectral_flow {
            Some(sf) => ck.expect(
                sf == 1 && out.exit_code == 0,
                format!("sf = {sf}, exit {}", out.exit_code),
            ),
            None => ck.fail(format!("{:?}", out.report.failure)),
        }
    })
}

pub fn criterion_2() -> CriterionResult {
    timed("2", "edge index of example2 on S^3", 30.0, |ck| {
        let out = cli(&["edge-index", "--family", "example2", "--scan", "64"]);
        let r = &out.report;
        ck.expect(
            r.edge_index == Some(-1),
            format!("index {}", opt(r.edge_index)),
        );
        ck.expect(
            matches_set(&r.fermi_points, &[vec![0.0, 0.0, 0.0, 1.0]], 1e-8, false),
            format!(
                "{} point(s) at {:?}",
                r.fermi_points.len(),
                r.fermi_points
                    .iter()
                    .map(|p| &p.location)
                    .collect::<Vec<_>>()
            ),
        );
        if let Some(f) = &r.failure {
            ck.fail(&f.message);
        }
    })
}

pub fn criterion_3() -> CriterionResult {
    timed("3", "edge index of example3 on T^3", 60.0, |ck| {
        let out = cli(&["edge-index", "--family", "example3", "--scan", "64"]);
        let r = &out.report;
        ck.expect(
            r.edge_index == Some(2),
            format!("index {}", opt(r.edge_index)),
        );
        let expected = [
            vec![2.0 * PI / 3.0, 4.0 * PI / 3.0, 7.0 * PI / 6.0],
            vec![4.0 * PI / 3.0, 2.0 * PI / 3.0, 5.0 * PI / 6.0],
        ];
        ck.expect(
            matches_set(&r.fermi_points, &expected, 1e-8, true),
            format!("{} points located", r.fermi_points.len()),
        );
        let want = -(3f64.sqrt()) / 2.0;
        let worst = r
            .fermi_points
            .iter()
            .map(|p| (p.det - want).abs())
            .fold(0.0, f64::max);
        ck.expect(
            !r.fermi_points.is_empty() && worst < 1e-10,
            format!("max |det J + sqrt3/2| = {worst:.2e}"),
        );
        if let Some(f) = &r.failure {
            ck.fail(&f.message);
        }
    })
}

pub fn criterion_4() -> CriterionResult {
    timed("4", "even edge index of example4 on S^2", 30.0, |ck| {
        let out = cli(&["edge-index", "--family", "example4", "--scan", "64"]);
        let r = &out.report;
        ck.expect(
            r.edge_index == Some(1),
            format!("index {}", opt(r.edge_index)),
        );
        ck.expect(
            matches_set(&r.fermi_points, &[vec![0.0, 0.0, 1.0]], 1e-8, false),
            "single point b = 0, w = 1",
        );
        if let Some(f) = &r.failure {
            ck.fail(&f.message);
        }
    })
}

/// Closed-form Fermi set of `Ĥₙ`, written out independently of the catalog.
fn union_formula(n: u32) -> Vec<Vec<f64>> {
    let nf = n as f64;
    (1..=n)
        .flat_map(|l| {
            let s = 2.0 * (l as f64 - 1.0) * PI / nf;
            [
                vec![2.0 * PI / (3.0 * nf) + s, 4.0 * PI / 3.0, 7.0 * PI / 6.0],
                vec![4.0 * PI / (3.0 * nf) + s, 2.0 * PI / 3.0, 5.0 * PI / 6.0],
            ]
        })
        .collect()
}

pub fn criterion_5() -> Vec<CriterionResult> {
    [(1u32, "5a"), (2, "5b"), (3, "5c")]
        .into_iter()
        .map(|(n, id)| {
            timed(id, "edge index of hn equals 2n", 120.0, |ck| {
                let fam = format!("hn:{n}");
                let out = cli(&["edge-index", "--family", &fam]);
                let r = &out.report;
                ck.expect(
                    r.edge_index == Some(2 * n as i64),
                    format!("n = {n}: index {}", opt(r.edge_index)),
                );
                ck.expect(
                    matches_set(&r.fermi_points, &union_formula(n), 1e-8, true),
                    format!(
                        "{} points vs {} in the union formula",
                        r.fermi_points.len(),
                        2 * n
                    ),
                );
                if let Some(f) = &r.failure {
                    ck.fail(&f.message);
                }
            })
        })
        .collect()
}

pub fn criterion_6() -> Vec<CriterionResult> {
    let mut out = Vec::new();
    for (n, grid, id) in [
        (1u32, 12usize, "6a"),
        (1, 16, "6b"),
        (2, 12, "6c"),
        (2, 16, "6d"),
    ] {
        out.push(timed(id, "bulk c2 of hn equals -2n", 180.0, |ck| match second_chern_number(&hn_bulk(n), grid) {
            Ok(r) => {
                let dev = (r.raw - r.rounded as f64).abs();
                ck.expect(
                    r.rounded == -2 * n as i64 && dev < 0.02,
                    format!("n = {n}, grid {grid}: raw {:.6}, rounded {}, |raw - rounded| = {dev:.2e}", r.raw, r.rounded),
                );
                if let Some(cv) = r.curvature_raw {
                    ck.notes.push(format!("plaquette curvature diagnostic {cv:.4}"));
                }
            }
            Err(e) => ck.fail(e.to_string()),
        }));
    }
    out
}

pub fn criterion_7() -> Vec<CriterionResult> {
    [
        ("hn:1", "7a"),
        ("hn:2", "7b"),
        ("hn-stab:1", "7c"),
        ("hn-stab:2", "7d"),
    ]
    .into_iter()
    .map(|(fam, id)| {
        timed(id, "bulk-edge identity c2 = -index", 300.0, |ck| {
            let out = cli(&["verify-bec", "--family", fam, "--grid", "16", "--N", "60"]);
            let r = &out.report;
            ck.expect(
                r.bulk_edge_ok == Some(true) && out.exit_code == 0,
                format!(
                    "{fam}: c2 {}, index {}, exit {}",
                    opt(r.bulk_c2),
                    opt(r.edge_index),
                    out.exit_code
                ),
            );
            if let Some(f) = &r.failure {
                ck.fail(&f.message);
            }
        })
    })
    .collect()
}

pub fn criterion_8() -> CriterionResult {
    timed("8", "class-AI evenness and its violation", 60.0, |ck| {
        for fam in ["example3", "hn:1", "hn:2", "hn:3"] {
            let pm = lookup(fam).unwrap().edge.unwrap();
            match check_evenness(&pm, 64) {
                Ok(r) => ck.expect(
                    r.edge_index % 2 == 0 && r.pairs.len() * 2 == r.points.len(),
                    format!("{fam}: {} pairs, index {}", r.pairs.len(), r.edge_index),
                ),
                Err(e) => ck.fail(format!("{fam}: {e}")),
            }
        }
        let broken = lookup("example3-broken").unwrap().edge.unwrap();
        match check_evenness(&broken, 64) {
            Err(Error::SymmetryViolation(_)) => {
                ck.notes.push("example3-broken: symmetry violation".into())
            }
            other => ck.fail(format!(
                "example3-broken: expected a symmetry violation, got {other:?}"
            )),
        }
    })
}

#[derive(Debug, Default)]
struct OracleStats {
    samples: usize,
    count_failures: Vec<String>,
    energy_worst_ratio: f64,
    vector_checks: usize,
    vector_failures: usize,
    worst_cosine: f64,
    smallest_failing_c: f64,
}

fn random_disk(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    let rad = r * rng.gen_range(0.0f64..1.0).sqrt();
    let th = rng.gen_range(0.0..2.0 * PI);
    c(rad * th.cos(), rad * th.sin())
}

/// Draws a local-model point and energy; the case index cycles through the
/// two edge branches, a generic energy, the zero-mode pair and `b = 0`.
fn oracle_sample(rng: &mut ChaCha8Rng, case: usize) -> LocalModelParams {
    let cc = random_disk(rng, 0.9);
    let a = rng.gen_range(-1.0..1.0);
    let b = random_disk(rng, 1.0);
    let p = match case {
        0 | 1 | 2 => LocalModelParams::new(a, b, cc),
        3 => LocalModelParams::new(0.0, c(0.0, 0.0), cc),
        _ => LocalModelParams::new(a, c(0.0, 0.0), cc),
    };
    let m = p.mass2().sqrt();
    let e = match case {
        0 => m,
        1 => -m,
        2 => rng.gen_range(-2.0..2.0),
        3 => 0.0,
        _ => {
            if rng.gen_bool(0.5) {
                a
            } else {
                -a
            }
        }
    };
    p.at_energy(e)
}

fn oracle_suite(seed: u64, samples: usize, n_sites: usize) -> OracleStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut st = OracleStats {
        worst_cosine: 1.0,
        smallest_failing_c: f64::INFINITY,
        ..Default::default()
    };
    for i in 0..samples {
        let p = oracle_sample(&mut rng, i % 5);
        st.samples += 1;
        let abs_c = p.c.norm();
        let tol = 10.0 * abs_c.powi(n_sites as i32) + 1e-10;
        let kernel = match kernel_classification(&p) {
            Ok(k) => k,
            Err(e) => {
                st.count_failures.push(format!("sample {i}: {e}"));
                continue;
            }
        };
        let symbol = BlockSymbol::local(&p);
        let gap = 2.0 * auto_mu(&symbol);
        let edge = p.mass2().sqrt();
        let mu = 0.5 * (edge + gap);
        let cluster_tol = end_mode_cluster_tol(abs_c, n_sites);
        let window = truncate(&symbol, n_sites)
            .and_then(|t| low_energy_window_with(&t, mu, DEFAULT_LOC_THRESHOLD, cluster_tol));
        let window = match window {
            Ok(w) => w,
            Err(e) => {
                st.count_failures.push(format!("sample {i}: {e}"));
                continue;
            }
        };
        let mut vals = window.certified_values();
        vals.sort_by(f64::total_cmp);
        // The half-line operator has exactly one bound state at each of ±sqrt(m2).
        let expected = [-edge, edge];
        let energies_ok = vals.len() == 2
            && vals
                .iter()
                .zip(&expected)
                .all(|(v, e)| (v - e).abs() <= tol);
        if vals.len() == 2 {
            let ratio = vals
                .iter()
                .zip(&expected)
                .map(|(v, e)| (v - e).abs() / tol)
                .fold(0.0, f64::max);
            st.energy_worst_ratio = st.energy_worst_ratio.max(ratio);
        }
        let at_e = vals.iter().filter(|v| (*v - p.e).abs() <= tol).count();
        let want = match kernel.kind {
            KernelKind::NoSolution => Some(0),
            KernelKind::Dim1 => Some(1),
            KernelKind::Dim2 => Some(2),
            KernelKind::InfiniteDim => None,
        };
        if !energies_ok || want != Some(at_e) {
            st.count_failures.push(format!(
                "sample {i}: kernel {:?}, window {:?} at E = {:?} for a = {:?}, b = {:?}, c = {:?}",
                kernel.kind, vals, p.e, p.a, p.b, p.c
            ));
            continue;
        }
        if kernel.kind == KernelKind::Dim1 {
            let exact = kernel.basis[0].truncated(n_sites);
            let best = window
                .certified()
                .min_by(|x, y| {
                    (x.eigenvalue - p.e)
                        .abs()
                        .total_cmp(&(y.eigenvalue - p.e).abs())
                })
                .expect("one certified state at E");
            let dot: C64 = exact
                .iter()
                .zip(&best.vector)
                .map(|(u, v)| u.conj() * v)
                .sum();
            let nu: f64 = exact.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let nv: f64 = best.vector.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let cos = dot.norm() / (nu * nv);
            st.vector_checks += 1;
            st.worst_cosine = st.worst_cosine.min(cos);
            if cos < 1.0 - 1e-8 {
                st.vector_failures += 1;
                st.smallest_failing_c = st.smallest_failing_c.min(abs_c);
            }
        }
    }
    st
}

pub fn criterion_9(seed: u64) -> Vec<CriterionResult> {
    let t = Instant::now();
    let st = oracle_suite(seed, 500, 60);
    let seconds = t.elapsed().as_secs_f64();
    let limit = 180.0;
    let mut a = Check::new();
    a.expect(
        st.count_failures.is_empty(),
        format!(
            "{} samples, {} disagreements, worst energy error {:.2e} x tolerance",
            st.samples,
            st.count_failures.len(),
            st.energy_worst_ratio
        ),
    );
    for f in st.count_failures.iter().take(3) {
        a.notes.push(f.clone());
    }
    let mut b = Check::new();
    let smallest = if st.smallest_failing_c.is_finite() {
        format!(", smallest failing |c| = {:.4}", st.smallest_failing_c)
    } else {
        String::new()
    };
    b.expect(
        st.vector_failures == 0,
        format!(
            "{} of {} edge vectors below cosine 1 - 1e-8, worst 1 - cos = {:.2e}{smallest}",
            st.vector_failures,
            st.vector_checks,
            1.0 - st.worst_cosine
        ),
    );
    if seconds >= limit {
        a.fail(format!("runtime {seconds:.1} s exceeds {limit} s"));
    }
    vec![
        CriterionResult {
            id: "9a",
            title: "local-model kernel vs certified window: count and energies",
            pass: a.ok,
            detail: a.notes.join("; "),
            seconds,
            limit_seconds: limit,
        },
        CriterionResult {
            id: "9b",
            title: "local-model kernel vs certified window: eigenvectors",
            pass: b.ok && seconds < limit,
            detail: b.notes.join("; "),
            seconds,
            limit_seconds: limit,
        },
    ]
}

/// Coefficients `[1, s₁, s₂, s₃, s₄]` of `det(λ − R)` (Faddeev-LeVerrier).
fn char_poly(r: &CMat) -> Vec<C64> {
    let n = r.nrows();
    let mut coeffs = vec![c(1.0, 0.0)];
    let mut m = CMat::zeros(n, n);
    let id = CMat::identity(n, n);
    for k in 1..=n {
        m = r * &m + &id * coeffs[k - 1];
        let rm = r * &m;
        coeffs.push(-rm.trace() / c(k as f64, 0.0));
    }
    coeffs
}

fn poly_mul(p: &[C64], q: &[C64]) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn det4(m: &CMat) -> C64 {
    m.clone().determinant()
}

pub fn criterion_10(seed: u64) -> CriterionResult {
    timed("10", "transfer-matrix identities", 10.0, |ck| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7A5F);
        let (mut det_err, mut poly_err, mut rec_err) = (0.0f64, 0.0f64, 0.0f64);
        let a_blk = a_block();
        for _ in 0..1000 {
            let a = rng.gen_range(-1.0..1.0);
            let b = random_disk(&mut rng, 1.0);
            let rad = rng.gen_range(0.25..1.5);
            let th = rng.gen_range(0.0..2.0 * PI);
            let cc = c(rad * th.cos(), rad * th.sin());
            let e = rng.gen_range(-2.0..2.0);
            let p = LocalModelParams::new(a, b, cc).at_energy(e);
            let r = match transfer_matrix(&p) {
                Ok(r) => r,
                Err(err) => {
                    ck.fail(err.to_string());
                    return;
                }
            };
            let q = cc / cc.conj();
            det_err = det_err.max((det4(&r) - q * q).norm());
            // det(λ − R) = (λ² − (S / c̄) λ + c / c̄)², S = |a|² + |b|² + |c|² + 1 − E².
            let s = a * a + b.norm_sqr() + cc.norm_sqr() + 1.0 - e * e;
            let quad = [c(1.0, 0.0), -c(s, 0.0) / cc.conj(), q];
            let want = poly_mul(&quad, &quad);
            let got = char_poly(&r);
            for (g, w) in got.iter().zip(&want) {
                poly_err = poly_err.max((g - w).norm() / w.norm().max(1.0));
            }
            // Forward recursion from a boundary-compatible start vector.
            let span = initial_span(&p);
            let (u, v) = (random_disk(&mut rng, 1.0), random_disk(&mut rng, 1.0));
            let start = nalgebra::DVector::from_fn(4, |i, _| u * span[0][i] + v * span[1][i]);
            let mut psi = vec![nalgebra::DVector::<C64>::zeros(4), start];
            for n in 1..6 {
                let next = &r * &psi[n];
                psi.push(next);
            }
            let h0 = v_block(&p) - CMat::identity(4, 4) * c(e, 0.0);
            let scale = psi.iter().map(|x| x.norm()).fold(1.0, f64::max);
            for n in 1..6 {
                let res = &a_blk * &psi[n - 1] + &h0 * &psi[n] + a_blk.adjoint() * &psi[n + 1];
                rec_err = rec_err.max(res.norm() / scale);
            }
        }
        ck.expect(
            det_err <= 1e-11,
            format!("max |det R - (c/conj c)^2| = {det_err:.2e}"),
        );
        ck.expect(
            poly_err <= 1e-11,
            format!("max char-poly coefficient error {poly_err:.2e}"),
        );
        ck.expect(
            rec_err <= 1e-11,
            format!("max half-line residual {rec_err:.2e}"),
        );
    })
}

pub fn criterion_11(seed: u64) -> CriterionResult {
    timed("11", "Clifford property suite", 5.0, |ck| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC11F);
        let mut worst = 0.0f64;
        for n in [2usize, 4, 6] {
            let rep = standard_graded_rep(n).unwrap();
            let mut all = rep.gammas.clone();
            all.push(rep.epsilon.clone());
            worst = worst.max(relation_defect(&all));
            ck.expect(
                rep.dim == 1 << (n / 2),
                format!("graded n = {n}: dim {}", rep.dim),
            );
            ck.expect(
                commutant_dimension(&rep.gammas) == 1,
                format!("graded n = {n} irreducible"),
            );
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let m = clifford_mu(&rep, &x).unwrap();
            let r2: f64 = x.iter().map(|v| v * v).sum();
            worst = worst.max(
                max_abs(&(&m * &m - CMat::identity(rep.dim, rep.dim) * c(r2, 0.0))) / r2.max(1.0),
            );
        }
        for n in [1usize, 3, 5] {
            let rep = standard_ungraded_rep(n).unwrap();
            worst = worst.max(relation_defect(rep.generators()));
            ck.expect(
                rep.dimension() == 1 << ((n - 1) / 2),
                format!("ungraded n = {n}: dim {}", rep.dimension()),
            );
            ck.expect(
                commutant_dimension(rep.generators()) == 1,
                format!("ungraded n = {n} irreducible"),
            );
        }
        for (p, q) in [(2usize, 2usize), (2, 4), (4, 2)] {
            let t = graded_tensor(
                &standard_graded_rep(p).unwrap(),
                &standard_graded_rep(q).unwrap(),
            );
            let mut all = t.gammas.clone();
            all.push(t.epsilon.clone());
            worst = worst.max(relation_defect(&all));
            let d = t.dim;
            let even_first =
                (0..d).all(|i| t.epsilon[(i, i)].re == if i < d / 2 { 1.0 } else { -1.0 });
            ck.expect(
                t.gammas.len() == p + q && d == (1 << (p / 2)) * (1 << (q / 2)) && even_first,
                format!("tensor {p}+{q}: {} generators, dim {d}", t.gammas.len()),
            );
        }
        ck.expect(
            worst <= RELATION_TOL,
            format!("max relation defect {worst:.1e}"),
        );

        let mut susp = 0.0f64;
        for i in 0..100 {
            let n = [2usize, 4, 6][i % 3];
            let rep = standard_graded_rep(n).unwrap();
            let ts: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI / 2.0..PI / 2.0)).collect();
            let it = iterated_suspension(&rep.epsilon, &rep.gammas, &ts).unwrap();
            let cf =
                suspension_closed_form(&rep.epsilon, &rep.gammas, &suspension_coordinates(&ts));
            susp = susp.max(max_abs(&(it - cf)));
        }
        ck.expect(
            susp <= 1e-12,
            format!("suspension closed form vs iteration {susp:.1e} over 100 samples"),
        );
    })
}

pub fn criterion_12(seed: u64) -> CriterionResult {
    timed(
        "12",
        "orientation, resolution and gauge invariance",
        300.0,
        |ck| {
            let quick = EdgeOptions {
                certify: false,
                ..EdgeOptions::default()
            };
            for fam in ["example1", "example2", "example3"] {
                let pm = lookup(fam).unwrap().edge.unwrap();
                let fwd = edge_index(&pm, &quick).map(|r| r.edge_index);
                let rev = edge_index(&pm.reversed(), &quick).map(|r| r.edge_index);
                match (fwd, rev) {
                    (Ok(f), Ok(r)) => {
                        ck.expect(r == -f && f != 0, format!("{fam}: {f} -> {r} reversed"))
                    }
                    (f, r) => ck.fail(format!("{fam}: {f:?} / {r:?}")),
                }
            }
            let pm = example1_map();
            let mu = 2f64.sqrt();
            match (
                spectral_flow(&pm, 60, mu, 512),
                spectral_flow(&pm.reversed(), 60, mu, 512),
            ) {
                (Ok(f), Ok(r)) => ck.expect(
                    r.spectral_flow == -f.spectral_flow && f.spectral_flow != 0,
                    format!("sf {} -> {} reversed", f.spectral_flow, r.spectral_flow),
                ),
                (f, r) => ck.fail(format!("spectral flow: {f:?} / {r:?}")),
            }
            for fam in ["example2", "example3", "example4", "hn:2"] {
                let pm = lookup(fam).unwrap().edge.unwrap();
                let at = |scan| {
                    edge_index(
                        &pm,
                        &EdgeOptions {
                            scan,
                            ..quick.clone()
                        },
                    )
                    .map(|r| r.edge_index)
                };
                match (at(32), at(64)) {
                    (Ok(a), Ok(b)) => {
                        ck.expect(a == b, format!("{fam}: scan 32 -> {a}, 64 -> {b}"))
                    }
                    (a, b) => ck.fail(format!("{fam}: {a:?} / {b:?}")),
                }
            }
            let bulk = hn_bulk(1);
            let plain = second_chern_number_with(&bulk, 12, &ChernOptions::default());
            let gauged = second_chern_number_with(
                &bulk,
                12,
                &ChernOptions {
                    gauge_seed: Some(seed),
                    ..Default::default()
                },
            );
            match (plain, gauged) {
                (Ok(p), Ok(g)) => {
                    let d_raw = (p.raw - g.raw).abs();
                    let d_curv = match (p.curvature_raw, g.curvature_raw) {
                        (Some(x), Some(y)) => (x - y).abs(),
                        _ => f64::INFINITY,
                    };
                    ck.expect(
                        d_raw <= 1e-12 && d_curv <= 1e-12,
                        format!("gauge change moves raw by {d_raw:.1e}, curvature by {d_curv:.1e}"),
                    );
                }
                (p, g) => ck.fail(format!("gauge runs: {:?} / {:?}", p.err(), g.err())),
            }
        },
    )
}

/// Runs every criterion in order.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    let mut out = vec![criterion_1(), criterion_2(), criterion_3(), criterion_4()];
    out.extend(criterion_5());
    out.extend(criterion_6());
    out.extend(criterion_7());
    out.push(criterion_8());
    out.extend(criterion_9(seed));
    out.push(criterion_10(seed));
    out.push(criterion_11(seed));
    out.push(criterion_12(seed));
    out
}
