use std::io::Write;

use edgeflow_cli::config::*;

fn write_config(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn defaults_apply_without_a_file() {
    let cfg = parse_args(["edgeflow", "edge-index", "--family", "example3"]).unwrap();
    assert_eq!(cfg.command, CommandKind::EdgeIndex);
    assert_eq!(cfg.grid, DEFAULT_GRID);
    assert_eq!(cfg.scan, DEFAULT_SCAN);
    assert_eq!(cfg.n_sites, DEFAULT_SITES);
    assert_eq!(cfg.samples, DEFAULT_SAMPLES);
    assert_eq!(cfg.seed, DEFAULT_SEED);
    assert_eq!(cfg.mu, Mu::Auto);
    assert_eq!(cfg.format, Format::Json);
    assert_eq!(cfg.family, Some(FamilySpec::Catalog("example3".into())));
}

#[test]
fn flags_override_file_values() {
    let f = write_config(
        r#"
command = "bulk-chern"
family = "hn:1"

[numerics]
grid = 12
N = 40
mu = 0.5

[runtime]
seed = 7
threads = "auto"
"#,
    );
    let path = f.path().to_str().unwrap();
    let cfg = parse_args(["edgeflow", "--config", path, "--grid", "10", "--mu", "auto"]).unwrap();
    assert_eq!(cfg.command, CommandKind::BulkChern);
    assert_eq!(cfg.grid, 10);
    assert_eq!(cfg.n_sites, 40);
    assert_eq!(cfg.mu, Mu::Auto);
    assert_eq!(cfg.seed, 7);
    assert_eq!(cfg.threads, Threads::Auto);

    let cfg = parse_args([
        "edgeflow",
        "edge-index",
        "--config",
        path,
        "--family",
        "example1",
    ])
    .unwrap();
    assert_eq!(cfg.command, CommandKind::EdgeIndex);
    assert_eq!(cfg.family, Some(FamilySpec::Catalog("example1".into())));
    assert_eq!(cfg.mu, Mu::Value(0.5));
}

#[test]
fn unknown_keys_are_rejected() {
    let f =
        write_config("command = \"edge-index\"\nfamily = \"example1\"\n[numerics]\ngird = 12\n");
    let err = parse_args(["edgeflow", "--config", f.path().to_str().unwrap()]).unwrap_err();
    assert!(matches!(err, ConfigError::Parse { .. }), "{err}");
}

#[test]
fn custom_family_from_the_file() {
    let f = write_config(
        r#"
command = "edge-index"

[custom]
id = "chain"
dim = 1
model = "Chain"
a = [{ coeff = 1.0, freq = [1], sin = true }]
re_c = [{ coeff = 1.5, freq = [0] }, { coeff = 1.0, freq = [1] }]
"#,
    );
    let cfg = parse_args(["edgeflow", "--config", f.path().to_str().unwrap()]).unwrap();
    match cfg.family {
        Some(FamilySpec::Custom(t)) => {
            assert_eq!(t.id, "chain");
            assert_eq!(t.re_c.len(), 2);
        }
        other => panic!("expected a custom family, got {other:?}"),
    }
}

#[test]
fn family_and_custom_together_are_rejected() {
    let f = write_config(
        "command = \"edge-index\"\nfamily = \"example1\"\n[custom]\nid = \"x\"\ndim = 1\nmodel = \"Chain\"\n",
    );
    assert!(parse_args(["edgeflow", "--config", f.path().to_str().unwrap()]).is_err());
}

#[test]
fn invalid_values_are_usage_errors() {
    let bad: &[&[&str]] = &[
        &["edgeflow", "edge-index", "--family", "hn:0"],
        &["edgeflow", "edge-index", "--family", "example9"],
        &["edgeflow", "edge-index"],
        &["edgeflow", "bulk-chern", "--family", "hn:1", "--grid", "4"],
        &["edgeflow", "edge-index", "--family", "example1", "--N", "3"],
        &[
            "edgeflow",
            "edge-index",
            "--family",
            "example1",
            "--mu",
            "-1",
        ],
        &[
            "edgeflow",
            "edge-index",
            "--family",
            "example1",
            "--threads",
            "0",
        ],
        &[
            "edgeflow",
            "edge-index",
            "--family",
            "example1",
            "--mu",
            "wide",
        ],
        &["edgeflow", "--family", "example1"],
    ];
    for args in bad {
        assert!(
            parse_args(args.iter().copied()).is_err(),
            "{args:?} was accepted"
        );
    }
}

#[test]
fn format_follows_flag_then_file_then_extension() {
    let cfg = parse_args([
        "edgeflow",
        "edge-index",
        "--family",
        "example1",
        "-o",
        "r.csv",
    ])
    .unwrap();
    assert_eq!(cfg.format, Format::Csv);
    let cfg = parse_args([
        "edgeflow",
        "edge-index",
        "--family",
        "example1",
        "-o",
        "r.csv",
        "--format",
        "text",
    ])
    .unwrap();
    assert_eq!(cfg.format, Format::Text);
    let f = write_config("[output]\nformat = \"csv\"\n");
    let cfg = parse_args([
        "edgeflow",
        "edge-index",
        "--family",
        "example1",
        "--config",
        f.path().to_str().unwrap(),
        "-o",
        "r.json",
    ])
    .unwrap();
    assert_eq!(cfg.format, Format::Csv);
}

#[test]
fn explicit_thread_count_wins_over_environment() {
    let cfg = parse_args([
        "edgeflow",
        "edge-index",
        "--family",
        "example1",
        "--threads",
        "3",
    ])
    .unwrap();
    assert_eq!(cfg.resolved_threads(), Some(3));
}

#[test]
fn negative_energy_is_accepted() {
    let cfg = parse_args([
        "edgeflow",
        "local-kernel",
        "--family",
        "local:0.5,0,0,0.3,0",
        "--energy",
        "-0.5",
    ])
    .unwrap();
    assert_eq!(cfg.energy, -0.5);
}
