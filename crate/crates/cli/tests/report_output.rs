use edgeflow::fermi::{InvariantReport, REPORT_SCHEMA_VERSION};
use edgeflow_cli::config::{parse_args, Format};
use edgeflow_cli::emit::{from_json, render, to_canonical_json, to_csv};
use edgeflow_cli::run::{run, EXIT_MISMATCH, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};

fn run_args(args: &[&str]) -> (InvariantReport, i32) {
    let cfg = parse_args(args.iter().copied()).unwrap();
    let out = run(&cfg);
    (out.report, out.exit_code)
}

#[test]
fn edge_index_report_round_trips_through_json() {
    let (report, code) = run_args(&["edgeflow", "edge-index", "--family", "example3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(report.schema_version, REPORT_SCHEMA_VERSION);
    assert_eq!(report.edge_index, Some(2));
    let text = to_canonical_json(&report).unwrap();
    let back = from_json(&text).unwrap();
    assert_eq!(back.edge_index, report.edge_index);
    assert_eq!(back.fermi_points.len(), 2);
    for (a, b) in back.fermi_points.iter().zip(&report.fermi_points) {
        assert_eq!(a.det, b.det);
        assert_eq!(a.location, b.location);
    }
    // Canonical output is stable under a second round trip.
    assert_eq!(to_canonical_json(&back).unwrap(), text);
}

#[test]
fn canonical_json_sorts_keys() {
    let (report, _) = run_args(&["edgeflow", "fermi-points", "--family", "example1"]);
    let text = to_canonical_json(&report).unwrap();
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim_start().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn csv_lists_fermi_points() {
    let (report, _) = run_args(&["edgeflow", "edge-index", "--family", "example3"]);
    let csv = to_csv(&report).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "chart,coords,sign,det_j,abs_c,residual");
    assert_eq!(lines.len(), 3);
    assert!(!csv.contains('\r'));
    for l in &lines[1..] {
        assert_eq!(l.split(',').nth(2), Some("1"));
        assert_eq!(l.split(',').nth(1).unwrap().split(';').count(), 3);
    }
}

#[test]
fn csv_is_header_only_without_points() {
    let empty = InvariantReport::new("none", "edge-index");
    assert_eq!(
        to_csv(&empty).unwrap(),
        "chart,coords,sign,det_j,abs_c,residual\n"
    );
}

#[test]
fn local_kernel_reports_the_zero_mode_pair() {
    let (report, code) = run_args(&[
        "edgeflow",
        "local-kernel",
        "--family",
        "local:0,0,0,0.5,0",
        "--energy",
        "0",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(report.local_kernel.len(), 1);
    let csv = to_csv(&report).unwrap();
    assert!(csv.starts_with("a,re_b,im_b,re_c,im_c,energy,kind,clause,basis_size\n"));
    assert!(csv.contains(",Dim2,ZeroModePair,2"));
    assert!(render(&report, Format::Text)
        .unwrap()
        .contains("local-kernel"));
}

#[test]
fn spectral_flow_of_the_chain_example() {
    let (report, code) = run_args(&["edgeflow", "spectral-flow", "--family", "example1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(report.spectral_flow, Some(1));
    assert!(to_csv(&report).unwrap().starts_with("k0,k1,direction\n"));
}

#[test]
fn exit_codes_by_failure_kind() {
    // Evenness on a family without class-AI symmetry is a mismatch.
    let (report, code) = run_args(&["edgeflow", "check-evenness", "--family", "example3-broken"]);
    assert_eq!(code, EXIT_MISMATCH);
    assert_eq!(report.failure.unwrap().kind, "symmetry-violation");
    // A command that does not fit the family is a usage error.
    let (_, code) = run_args(&["edgeflow", "bulk-chern", "--family", "example1"]);
    assert_eq!(code, EXIT_USAGE);
    // Boundary-degenerate local parameters are a numerical failure.
    let (report, code) = run_args(&[
        "edgeflow",
        "local-kernel",
        "--family",
        "local:0,0,0,1,0",
        "--energy",
        "0",
    ]);
    assert_eq!(code, EXIT_NUMERICAL);
    assert_eq!(report.failure.unwrap().kind, "boundary-degenerate");
}

#[test]
fn reports_are_bit_stable_across_runs() {
    let args = ["edgeflow", "edge-index", "--family", "example4"];
    let (a, _) = run_args(&args);
    let (b, _) = run_args(&args);
    let strip = |mut r: InvariantReport| {
        r.diagnostics.runtime_seconds = None;
        to_canonical_json(&r).unwrap()
    };
    assert_eq!(strip(a), strip(b));
}
