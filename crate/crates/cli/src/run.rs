//! Executes a [`RunConfig`] and maps the outcome to an exit code.

use std::f64::consts::PI;
use std::time::Instant;

use edgeflow::bloch::{second_chern_number, BlochFamily};
use edgeflow::catalog::{lookup, CatalogEntry};
use edgeflow::fermi::{
    check_evenness, edge_index, find_fermi_points_with, spectral_flow, verify_bulk_edge_with,
    EdgeOptions, Failure, InvariantReport, KernelEntry, ParamMap,
};
use edgeflow::local_model::kernel_classification;
use edgeflow::manifold::Base;
use edgeflow::toeplitz::auto_mu;
use edgeflow::Error;

use crate::config::{CommandKind, FamilySpec, Mu, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub struct Outcome {
    pub report: InvariantReport,
    pub exit_code: i32,
}

/// Exit code for a pipeline error.
pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::SymmetryViolation(_) => EXIT_MISMATCH,
        _ => EXIT_NUMERICAL,
    }
}

fn resolve_family(spec: &FamilySpec) -> Result<CatalogEntry, Error> {
    match spec {
        FamilySpec::Catalog(id) => lookup(id),
        FamilySpec::Custom(t) => {
            let pm = t.to_param_map()?;
            Ok(CatalogEntry {
                id: t.id.clone(),
                description: "custom trigonometric family".into(),
                base: Some(pm.base),
                edge: Some(pm),
                bulk: None,
                local: None,
            })
        }
    }
}

fn need_edge(entry: &CatalogEntry) -> Result<&ParamMap, Error> {
    entry
        .edge
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no edge family", entry.id)))
}

fn need_bulk(entry: &CatalogEntry) -> Result<&BlochFamily, Error> {
    entry
        .bulk
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument(format!("{} has no bulk family on T^4", entry.id)))
}

fn explicit_mu(cfg: &RunConfig) -> Option<f64> {
    match cfg.mu {
        Mu::Value(m) => Some(m),
        Mu::Auto => None,
    }
}

/// Window for spectral flow: the catalog radius, else half the smallest
/// symbol gap met along the loop.
fn loop_mu(pm: &ParamMap, cfg: &RunConfig) -> Result<f64, Error> {
    if let Some(m) = explicit_mu(cfg).or(pm.window) {
        return Ok(m);
    }
    let mut best = f64::INFINITY;
    for j in 0..64 {
        let k = 2.0 * PI * j as f64 / 64.0;
        best = best.min(auto_mu(&pm.symbol_at(&[k])?));
    }
    Ok(best)
}

fn edge_options(cfg: &RunConfig) -> EdgeOptions {
    EdgeOptions {
        scan: cfg.scan,
        n_sites: cfg.n_sites,
        mu: explicit_mu(cfg),
        certify: true,
        method: cfg.jacobian.into(),
    }
}

fn execute(cfg: &RunConfig, report: &mut InvariantReport) -> Result<i32, Error> {
    let spec = cfg
        .family
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("no family given".into()))?;
    let entry = resolve_family(spec)?;
    report.family = entry.id.clone();
    let d = &mut report.diagnostics;
    match cfg.command {
        CommandKind::BulkChern => {
            let c = second_chern_number(need_bulk(&entry)?, cfg.grid)?;
            report.absorb_chern(&c);
        }
        CommandKind::EdgeIndex => {
            let pm = need_edge(&entry)?;
            d.scan = Some(cfg.scan);
            d.n_sites = Some(cfg.n_sites);
            d.mu = explicit_mu(cfg).or(pm.window);
            let e = edge_index(pm, &edge_options(cfg))?;
            report.absorb_edge(&e);
        }
        CommandKind::FermiPoints => {
            let pm = need_edge(&entry)?;
            d.scan = Some(cfg.scan);
            let s = find_fermi_points_with(pm, cfg.scan, cfg.jacobian.into())?;
            d.warnings.extend(s.warnings);
            report.edge_index = Some(s.points.iter().map(|p| p.sign as i64).sum());
            report.fermi_points = s.points;
        }
        CommandKind::SpectralFlow => {
            let pm = need_edge(&entry)?;
            if pm.base != Base::Torus(1) {
                return Err(Error::InvalidArgument(format!(
                    "{} is not a one-parameter loop",
                    entry.id
                )));
            }
            let mu = loop_mu(pm, cfg)?;
            let sf = spectral_flow(pm, cfg.n_sites, mu, cfg.samples)?;
            let d = &mut report.diagnostics;
            d.n_sites = Some(cfg.n_sites);
            d.mu = Some(mu);
            d.samples = Some(cfg.samples);
            if sf.bisections > 0 {
                d.warnings
                    .push(format!("{} adaptive bisections", sf.bisections));
            }
            report.spectral_flow = Some(sf.spectral_flow);
            report.crossings = sf.crossings;
        }
        CommandKind::LocalKernel => {
            let p = entry
                .local
                .ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "{} is not a local:... parameter point",
                        entry.id
                    ))
                })?
                .at_energy(cfg.energy);
            let classification = kernel_classification(&p)?;
            report.local_kernel.push(KernelEntry {
                params: p,
                classification,
            });
        }
        CommandKind::VerifyBec => {
            let bulk = need_bulk(&entry)?;
            let r = verify_bulk_edge_with(bulk, cfg.grid, &edge_options(cfg))?;
            let ok = r.bulk_edge_ok == Some(true);
            let family = report.family.clone();
            *report = r;
            report.family = family;
            return Ok(if ok { 0 } else { 1 });
        }
        CommandKind::CheckEvenness => {
            let pm = need_edge(&entry)?;
            d.scan = Some(cfg.scan);
            match check_evenness(pm, cfg.scan) {
                Ok(ev) => {
                    report.evenness_ok = Some(true);
                    report.edge_index = Some(ev.edge_index);
                    report.fermi_points = ev.points;
                    report.diagnostics.ai_deviation = Some(ev.symmetry_deviation);
                }
                Err(e @ Error::SymmetryViolation(_)) => {
                    report.evenness_ok = Some(false);
                    return Err(e);
                }
                Err(e) => return Err(e),
            }
        }
        CommandKind::Selftest => unreachable!("selftest is dispatched separately"),
    }
    Ok(0)
}

/// Runs the configured pipeline. Failures are recorded in the report.
pub fn run(cfg: &RunConfig) -> Outcome {
    let started = Instant::now();
    let family = cfg
        .family
        .as_ref()
        .map(|f| f.id().to_string())
        .unwrap_or_default();
    let mut report = InvariantReport::new(family, cfg.command.to_string());
    report.diagnostics.grid =
        matches!(cfg.command, CommandKind::BulkChern | CommandKind::VerifyBec).then_some(cfg.grid);
    let exit_code = match execute(cfg, &mut report) {
        Ok(code) => code,
        Err(e) => {
            report.failure = Some(Failure::from(&e));
            exit_code_for(&e)
        }
    };
    report.command = cfg.command.to_string();
    report.diagnostics.runtime_seconds = Some(started.elapsed().as_secs_f64());
    Outcome { report, exit_code }
}
