//! Run configuration: command-line flags layered over an optional TOML file.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use edgeflow::catalog::{lookup, TrigFamily};
use edgeflow::fermi::JacobianMethod;
use serde::{Deserialize, Serialize};

pub const DEFAULT_GRID: usize = 16;
pub const DEFAULT_SCAN: usize = 64;
pub const DEFAULT_SITES: usize = 60;
pub const DEFAULT_SAMPLES: usize = 512;
pub const DEFAULT_SEED: u64 = 42;
/// Overrides the worker-thread count when `threads` is `auto`.
pub const THREADS_ENV: &str = "EDGEFLOW_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config file {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    BulkChern,
    EdgeIndex,
    SpectralFlow,
    FermiPoints,
    LocalKernel,
    VerifyBec,
    CheckEvenness,
    Selftest,
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.to_possible_value().expect("no skipped variants");
        f.write_str(s.get_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum JacobianArg {
    Auto,
    Analytic,
    Central,
}

impl From<JacobianArg> for JacobianMethod {
    fn from(j: JacobianArg) -> Self {
        match j {
            JacobianArg::Auto => JacobianMethod::Auto,
            JacobianArg::Analytic => JacobianMethod::Analytic,
            JacobianArg::Central => JacobianMethod::CentralDifference,
        }
    }
}

/// Window radius: a number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Mu {
    Value(f64),
    #[serde(with = "auto_keyword")]
    Auto,
}

/// Thread count: a number or `auto`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Threads {
    Count(usize),
    #[serde(with = "auto_keyword")]
    Auto,
}

mod auto_keyword {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", found \"{s}\""
            )))
        }
    }
}

impl FromStr for Mu {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Mu::Auto);
        }
        s.parse::<f64>()
            .map(Mu::Value)
            .map_err(|_| format!("expected a number or 'auto', got '{s}'"))
    }
}

impl FromStr for Threads {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        s.parse::<usize>()
            .map(Threads::Count)
            .map_err(|_| format!("expected an integer or 'auto', got '{s}'"))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "edgeflow",
    version,
    about = "Bulk and edge invariants of Hermitian families"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Cmd>,

    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Catalog id, e.g. example3, hn:2, local:0,1,0,0.5,0.
    #[arg(long, global = true)]
    pub family: Option<String>,

    /// Lattice size per axis for bulk c2.
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Scan resolution per axis for the Fermi-point search.
    #[arg(long = "scan", global = true)]
    pub scan: Option<usize>,

    /// Number of sites in the Toeplitz truncation.
    #[arg(long = "N", global = true)]
    pub n_sites: Option<usize>,

    /// Window radius, a positive number or "auto".
    #[arg(long, global = true)]
    pub mu: Option<Mu>,

    /// Loop samples for spectral flow.
    #[arg(long, global = true)]
    pub samples: Option<usize>,

    /// Energy for local-kernel.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub energy: Option<f64>,

    #[arg(long, value_enum, global = true)]
    pub jacobian: Option<JacobianArg>,

    /// Report destination; standard output when absent.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,

    /// Worker threads, an integer or "auto".
    #[arg(long, global = true)]
    pub threads: Option<Threads>,

    /// Seed for randomized checks.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Cmd {
    /// Second Chern number of a bulk family on T^4.
    BulkChern,
    /// Signed count of Fermi points of an edge family.
    EdgeIndex,
    /// Spectral flow of a one-parameter edge family.
    SpectralFlow,
    /// Locate and sign Fermi points without certification.
    FermiPoints,
    /// Kernel of the half-line local model at one parameter point.
    LocalKernel,
    /// Compare bulk c2 with the edge index.
    VerifyBec,
    /// Class-AI pairing and evenness of the Fermi points.
    CheckEvenness,
    /// Run the acceptance suite.
    Selftest,
}

impl From<Cmd> for CommandKind {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::BulkChern => CommandKind::BulkChern,
            Cmd::EdgeIndex => CommandKind::EdgeIndex,
            Cmd::SpectralFlow => CommandKind::SpectralFlow,
            Cmd::FermiPoints => CommandKind::FermiPoints,
            Cmd::LocalKernel => CommandKind::LocalKernel,
            Cmd::VerifyBec => CommandKind::VerifyBec,
            Cmd::CheckEvenness => CommandKind::CheckEvenness,
            Cmd::Selftest => CommandKind::Selftest,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<CommandKind>,
    pub family: Option<String>,
    pub custom: Option<TrigFamily>,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub runtime: RuntimeSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    pub grid: Option<usize>,
    pub scan: Option<usize>,
    #[serde(rename = "N")]
    pub n_sites: Option<usize>,
    pub mu: Option<Mu>,
    pub samples: Option<usize>,
    pub energy: Option<f64>,
    pub jacobian: Option<JacobianArg>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuntimeSection {
    pub threads: Option<Threads>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FamilySpec {
    Catalog(String),
    Custom(TrigFamily),
}

impl FamilySpec {
    pub fn id(&self) -> &str {
        match self {
            FamilySpec::Catalog(s) => s,
            FamilySpec::Custom(t) => &t.id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub family: Option<FamilySpec>,
    pub grid: usize,
    pub scan: usize,
    pub n_sites: usize,
    pub mu: Mu,
    pub samples: usize,
    pub energy: f64,
    pub jacobian: JacobianArg,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub threads: Threads,
    pub seed: u64,
}

impl RunConfig {
    /// Worker count after applying the environment override.
    pub fn resolved_threads(&self) -> Option<usize> {
        match self.threads {
            Threads::Count(n) => Some(n),
            Threads::Auto => std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .filter(|&n| n > 0),
        }
    }
}

pub fn load_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.message().to_string(),
    })
}

fn format_from_extension(p: &Path) -> Option<Format> {
    match p.extension()?.to_str()? {
        "json" => Some(Format::Json),
        "csv" => Some(Format::Csv),
        "txt" => Some(Format::Text),
        _ => None,
    }
}

/// Merges flags over the file and validates the result.
pub fn resolve(cli: Cli) -> Result<RunConfig, ConfigError> {
    let file = match &cli.config {
        Some(p) => load_file(p)?,
        None => FileConfig::default(),
    };
    let command = cli
        .command
        .map(CommandKind::from)
        .or(file.command)
        .ok_or_else(|| {
            ConfigError::Invalid(
                "no command given on the command line or in the config file".into(),
            )
        })?;

    let family = match (cli.family, file.family, file.custom) {
        (Some(id), _, _) => Some(FamilySpec::Catalog(id)),
        (None, Some(_), Some(_)) => {
            return Err(ConfigError::Invalid(
                "config file sets both `family` and `[custom]`".into(),
            ))
        }
        (None, Some(id), None) => Some(FamilySpec::Catalog(id)),
        (None, None, Some(custom)) => Some(FamilySpec::Custom(custom)),
        (None, None, None) => None,
    };
    match &family {
        Some(FamilySpec::Catalog(id)) => {
            lookup(id).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        Some(FamilySpec::Custom(t)) => t
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?,
        None if command != CommandKind::Selftest => {
            return Err(ConfigError::Invalid(format!("{command} needs --family")));
        }
        None => {}
    }

    let num = file.numerics;
    let output = cli.output.or(file.output.path);
    let format = cli
        .format
        .or(file.output.format)
        .or_else(|| output.as_deref().and_then(format_from_extension))
        .unwrap_or(Format::Json);
    let cfg = RunConfig {
        command,
        family,
        grid: cli.grid.or(num.grid).unwrap_or(DEFAULT_GRID),
        scan: cli.scan.or(num.scan).unwrap_or(DEFAULT_SCAN),
        n_sites: cli.n_sites.or(num.n_sites).unwrap_or(DEFAULT_SITES),
        mu: cli.mu.or(num.mu).unwrap_or(Mu::Auto),
        samples: cli.samples.or(num.samples).unwrap_or(DEFAULT_SAMPLES),
        energy: cli.energy.or(num.energy).unwrap_or(0.0),
        jacobian: cli.jacobian.or(num.jacobian).unwrap_or(JacobianArg::Auto),
        output,
        format,
        threads: cli
            .threads
            .or(file.runtime.threads)
            .unwrap_or(Threads::Auto),
        seed: cli.seed.or(file.runtime.seed).unwrap_or(DEFAULT_SEED),
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    if cfg.grid < 8 {
        return Err(ConfigError::Invalid(format!(
            "grid must be at least 8, got {}",
            cfg.grid
        )));
    }
    if cfg.n_sites < 8 {
        return Err(ConfigError::Invalid(format!(
            "N must be at least 8, got {}",
            cfg.n_sites
        )));
    }
    if cfg.scan == 0 || cfg.samples == 0 {
        return Err(ConfigError::Invalid(
            "scan and samples must be positive".into(),
        ));
    }
    if let Mu::Value(m) = cfg.mu {
        if !(m > 0.0 && m.is_finite()) {
            return Err(ConfigError::Invalid(format!(
                "mu must be positive, got {m}"
            )));
        }
    }
    if cfg.threads == Threads::Count(0) {
        return Err(ConfigError::Invalid("threads must be positive".into()));
    }
    if !cfg.energy.is_finite() {
        return Err(ConfigError::Invalid("energy must be finite".into()));
    }
    Ok(())
}

/// Parses an argument vector (including the program name).
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, ConfigError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    resolve(cli)
}
