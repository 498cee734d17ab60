//! Report serialization: canonical JSON, CSV tables and plain text.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use edgeflow::fermi::InvariantReport;
use serde_json::Value;

use crate::config::Format;

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("serialization: {0}")]
    Serialize(String),
}

/// JSON with keys sorted, floats printed with 17 significant digits and
/// integers printed exactly.
pub fn to_canonical_json(report: &InvariantReport) -> Result<String, EmitError> {
    let v = serde_json::to_value(report).map_err(|e| EmitError::Serialize(e.to_string()))?;
    let mut out = String::new();
    write_value(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

fn write_value(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                write!(out, "{:.16e}", n.as_f64().expect("finite float")).unwrap();
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escapes")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(k).expect("key escapes"));
                out.push_str(": ");
                write_value(&map[*k], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

pub fn from_json(text: &str) -> Result<InvariantReport, serde_json::Error> {
    serde_json::from_str(text)
}

fn csv_writer(buf: &mut Vec<u8>) -> csv::Writer<&mut Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(buf)
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.16e}"))
        .collect::<Vec<_>>()
        .join(";")
}

/// Table of the report's main rows: Fermi points for edge commands, kernel
/// rows for local-kernel, crossings for spectral-flow, section zeros for
/// bulk-chern.
pub fn to_csv(report: &InvariantReport) -> Result<String, EmitError> {
    let mut buf = Vec::new();
    {
        let mut w = csv_writer(&mut buf);
        let err = |e: csv::Error| EmitError::Serialize(e.to_string());
        match report.command.as_str() {
            "local-kernel" => {
                w.write_record([
                    "a",
                    "re_b",
                    "im_b",
                    "re_c",
                    "im_c",
                    "energy",
                    "kind",
                    "clause",
                    "basis_size",
                ])
                .map_err(err)?;
                for k in &report.local_kernel {
                    let p = &k.params;
                    w.write_record([
                        format!("{:.16e}", p.a),
                        format!("{:.16e}", p.b.re),
                        format!("{:.16e}", p.b.im),
                        format!("{:.16e}", p.c.re),
                        format!("{:.16e}", p.c.im),
                        format!("{:.16e}", p.e),
                        format!("{:?}", k.classification.kind),
                        format!("{:?}", k.classification.clause),
                        k.classification.basis.len().to_string(),
                    ])
                    .map_err(err)?;
                }
            }
            "spectral-flow" => {
                w.write_record(["k0", "k1", "direction"]).map_err(err)?;
                for c in &report.crossings {
                    w.write_record([
                        format!("{:.16e}", c.k0),
                        format!("{:.16e}", c.k1),
                        c.direction.to_string(),
                    ])
                    .map_err(err)?;
                }
            }
            "bulk-chern" => {
                w.write_record(["k", "sign", "det"]).map_err(err)?;
                for z in &report.bulk_zeros {
                    w.write_record([join(&z.k), z.sign.to_string(), format!("{:.16e}", z.det)])
                        .map_err(err)?;
                }
            }
            _ => {
                w.write_record(["chart", "coords", "sign", "det_j", "abs_c", "residual"])
                    .map_err(err)?;
                for p in &report.fermi_points {
                    w.write_record([
                        p.chart.to_string(),
                        join(&p.location),
                        p.sign.to_string(),
                        format!("{:.16e}", p.det),
                        format!("{:.16e}", p.c_value.norm()),
                        format!("{:.16e}", p.residual),
                    ])
                    .map_err(err)?;
                }
            }
        }
        w.flush().map_err(|e| EmitError::Serialize(e.to_string()))?;
    }
    String::from_utf8(buf).map_err(|e| EmitError::Serialize(e.to_string()))
}

pub fn to_text(report: &InvariantReport) -> String {
    let mut s = String::new();
    writeln!(s, "{} {}", report.command, report.family).unwrap();
    let opt = |v: Option<i64>| v.map_or("-".to_string(), |x| x.to_string());
    if report.bulk_c2.is_some() {
        writeln!(
            s,
            "  bulk c2        {}  (raw {:.6})",
            opt(report.bulk_c2),
            report.bulk_c2_raw.unwrap_or(f64::NAN)
        )
        .unwrap();
    }
    if report.edge_index.is_some() {
        writeln!(s, "  edge index     {}", opt(report.edge_index)).unwrap();
    }
    if report.spectral_flow.is_some() {
        writeln!(s, "  spectral flow  {}", opt(report.spectral_flow)).unwrap();
    }
    if let Some(ok) = report.bulk_edge_ok {
        writeln!(s, "  c2 = -index    {ok}").unwrap();
    }
    if let Some(ok) = report.evenness_ok {
        writeln!(s, "  evenness       {ok}").unwrap();
    }
    for p in &report.fermi_points {
        writeln!(
            s,
            "  point {:<8} {:?} sign {:+} det {:.6} |c| {:.6}",
            p.chart,
            p.location,
            p.sign,
            p.det,
            p.c_value.norm()
        )
        .unwrap();
    }
    for k in &report.local_kernel {
        writeln!(
            s,
            "  kernel {:?} via {:?}, basis size {}",
            k.classification.kind,
            k.classification.clause,
            k.classification.basis.len()
        )
        .unwrap();
    }
    for w in &report.diagnostics.warnings {
        writeln!(s, "  warning: {w}").unwrap();
    }
    if let Some(f) = &report.failure {
        writeln!(s, "  failure ({}): {}", f.kind, f.message).unwrap();
    }
    if let Some(t) = report.diagnostics.runtime_seconds {
        writeln!(s, "  runtime        {t:.2} s").unwrap();
    }
    s
}

pub fn render(report: &InvariantReport, format: Format) -> Result<String, EmitError> {
    match format {
        Format::Json => to_canonical_json(report),
        Format::Csv => to_csv(report),
        Format::Text => Ok(to_text(report)),
    }
}

/// Writes the rendered report to `path`, or to standard output.
pub fn emit_report(
    report: &InvariantReport,
    format: Format,
    path: Option<&Path>,
) -> Result<(), EmitError> {
    let body = render(report, format)?;
    match path {
        Some(p) => std::fs::write(p, body).map_err(|source| EmitError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(|source| EmitError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}
