use std::process::Command;

fn edgeflow() -> Command {
    Command::new(env!("CARGO_BIN_EXE_edgeflow"))
}

#[test]
fn usage_error_exits_with_two() {
    let out = edgeflow()
        .args(["edge-index", "--family", "hn:0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n >= 1"));
}

#[test]
fn unwritable_output_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("report.json");
    let out = edgeflow()
        .args(["fermi-points", "--family", "example1", "-o"])
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn report_is_written_to_the_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.csv");
    let out = edgeflow()
        .args(["edge-index", "--family", "example1", "--threads", "2", "-o"])
        .arg(&target)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let body = std::fs::read_to_string(&target).unwrap();
    assert!(body.starts_with("chart,coords,sign,det_j,abs_c,residual\n"));
    assert_eq!(body.lines().count(), 2);
}

#[test]
fn json_goes_to_stdout_by_default() {
    let out = edgeflow()
        .args(["fermi-points", "--family", "example2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.trim_start().starts_with('{'));
    assert!(text.contains("\"schema_version\": 1"));
}
