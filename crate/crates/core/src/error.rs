use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Numeric,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown well `{0}` (expected harmonic, tanh2, gauss, quartic or shape-class)")]
    UnknownWell(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: &'static str,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "auxiliary function escapes to infinity near x = {x}; not a well on the requested domain"
    )]
    AuxiliaryBlowUp { x: f64 },

    #[error("shape class does not form a well on [-{half_width}, {half_width}]")]
    NotAWell { half_width: f64 },

    #[error("energy {eps} is not above the well bottom {v_min}")]
    NoClassicalRegion { eps: f64, v_min: f64 },

    #[error("energy {eps} lies above the asymptote {asymptote}; not a bound level")]
    AboveAsymptote { eps: f64, asymptote: f64 },

    #[error("turning point bracket not found for energy {eps}")]
    TurningPointNotFound { eps: f64 },

    #[error("degenerate turning point at x = {x} (dV/dx = {slope})")]
    DegenerateTurningPoint { x: f64, slope: f64 },

    #[error("unbounded classical region at energy {eps}")]
    UnboundedRegion { eps: f64 },

    #[error("{what} did not converge (last estimates {last} and {previous})")]
    NoConvergence {
        what: &'static str,
        last: f64,
        previous: f64,
    },

    #[error("phase integral at the asymptote diverges (tail decays too slowly)")]
    DivergentPhaseAtAsymptote,

    #[error(
        "finite-difference stencil at energy {eps} with step {step} leaves the admissible interval"
    )]
    StencilInfeasible { eps: f64, step: f64 },

    #[error("improved shift has a vanishing denominator (delta1 = {delta1}, q = {q})")]
    ZeroDenominator { delta1: f64, q: f64 },

    #[error("phase integral at the asymptote is zero; simplified surrogate undefined")]
    ZeroPhaseAtAsymptote,

    #[error("shape-class coefficient A must be nonzero")]
    ZeroShapeAmplitude,

    #[error("well has no asymptote; {scheme} scheme inapplicable")]
    InapplicableScheme { scheme: &'static str },

    #[error("level {n} does not exist below the asymptote")]
    LevelNotFound { n: usize },

    #[error("quantization residual for level {n} not bracketed on [{lo}, {hi}]")]
    RootNotBracketed { n: usize, lo: f64, hi: f64 },

    #[error("no such bound state: n = {n}, well holds {count}")]
    NoSuchBoundState { n: usize, count: usize },

    #[error("oracle domain half-width {half_width} too small (relative eigenvalue shift {shift:e} on enlargement)")]
    OracleDomainTooSmall { half_width: f64, shift: f64 },

    #[error("analytic spectrum not available for well `{0}`")]
    NoAnalyticSpectrum(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::UnknownWell(_)
            | Error::InvalidParameter { .. }
            | Error::Config(_)
            | Error::ZeroShapeAmplitude => ErrorKind::Config,
            Error::InapplicableScheme { .. } | Error::NoAnalyticSpectrum(_) => {
                ErrorKind::Inapplicable
            }
            _ => ErrorKind::Numeric,
        }
    }
}
