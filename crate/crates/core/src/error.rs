use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes shared by all numerical pipelines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gapless input: {0}")]
    GaplessInput(String),

    #[error("resolution insufficient: {0}")]
    ResolutionInsufficient(String),

    #[error("Fourier cutoff insufficient: tail coefficient norm {tail:.3e} at degree {degree}")]
    CutoffInsufficient { degree: i32, tail: f64 },

    #[error("window boundary: eigenvalue {eigenvalue} lies within 1e-9 of the window edge {mu}")]
    WindowBoundary { eigenvalue: f64, mu: f64 },

    #[error("boundary-degenerate parameters: |c| = {abs_c} is too close to 1")]
    BoundaryDegenerate { abs_c: f64 },

    #[error("not a Fermi point at {location:?}: |det J| = {det:.3e}")]
    NotAFermiPoint { location: Vec<f64>, det: f64 },

    #[error("certification failed at {location:?}: {reason}")]
    CertificationFailed { location: Vec<f64>, reason: String },

    #[error("spectral-flow tracking failure on [{t0}, {t1}]: {reason}")]
    TrackingFailure { t0: f64, t1: f64, reason: String },

    #[error("symmetry violation: {0}")]
    SymmetryViolation(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::GaplessInput(_) => "gapless-input",
            Error::ResolutionInsufficient(_) => "resolution-insufficient",
            Error::CutoffInsufficient { .. } => "cutoff-insufficient",
            Error::WindowBoundary { .. } => "window-boundary",
            Error::BoundaryDegenerate { .. } => "boundary-degenerate",
            Error::NotAFermiPoint { .. } => "not-a-fermi-point",
            Error::CertificationFailed { .. } => "certification-failed",
            Error::TrackingFailure { .. } => "tracking-failure",
            Error::SymmetryViolation(_) => "symmetry-violation",
        }
    }
}
