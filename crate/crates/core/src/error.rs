use thiserror::Error;

/// Errors raised by the library. Every variant maps to a stable
/// machine-readable code via [`Error::code`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported domain: {0}")]
    UnsupportedDomain(String),
    #[error("point {0:?} lies outside the domain")]
    OutOfDomain(Vec<f64>),
    #[error("argument out of range: {0}")]
    Range(String),
    #[error("exponent p = {p} equals the critical trace exponent {critical}")]
    CriticalExponent { p: f64, critical: f64 },
    #[error("profile integral diverges: {0}")]
    Divergent(String),
    #[error("growth exponent q = {q} outside (1, {critical})")]
    GrowthRange { q: f64, critical: f64 },
    #[error("potential F({rho}) = {value} is not positive")]
    PotentialNonpositive { rho: f64, value: f64 },
    #[error("potential is nonpositive on (0, {zeta}]")]
    NoAdmissibleRho { zeta: f64 },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("comparison chain violated: {0}")]
    ChainViolation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("minimizer pinned to the ball boundary (residual {residual:e})")]
    BoundaryMinimum { residual: f64 },
    #[error("mountain-pass path collapsed onto an endpoint")]
    MountainPassCollapse,
    #[error("theorem violated numerically: {0}")]
    TheoremViolation(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnsupportedDomain(_) => "UNSUPPORTED_DOMAIN",
            Error::OutOfDomain(_) => "OUT_OF_DOMAIN",
            Error::Range(_) => "RANGE",
            Error::CriticalExponent { .. } => "CRITICAL_EXPONENT",
            Error::Divergent(_) => "DIVERGENT",
            Error::GrowthRange { .. } => "GROWTH_RANGE",
            Error::PotentialNonpositive { .. } => "POTENTIAL_NONPOSITIVE",
            Error::NoAdmissibleRho { .. } => "NO_ADMISSIBLE_RHO",
            Error::InternalInconsistency(_) => "INTERNAL_INCONSISTENCY",
            Error::ChainViolation(_) => "CHAIN_VIOLATION",
            Error::Precondition(_) => "PRECONDITION",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::BoundaryMinimum { .. } => "BOUNDARY_MINIMUM",
            Error::MountainPassCollapse => "MP_COLLAPSE",
            Error::TheoremViolation(_) => "THEOREM_VIOLATION",
            Error::Invalid(_) => "INVALID",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
