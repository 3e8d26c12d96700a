use thiserror::Error;

/// Errors raised by the q-calculus kernels, state constructors and diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("[{n}]! overflows f64; use the log-space value instead")]
    Overflow { n: usize },

    #[error("{what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("e_q has no real zero at q = {q}")]
    NoZeroFound { q: f64 },

    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("q-integration tail not converged: last shell {contribution:e} vs running sum {sum:e}")]
    TailNotConverged { contribution: f64, sum: f64 },

    #[error("q-integration needs a lattice; q = 1 has none")]
    DegenerateLattice,

    #[error("K_nu integrand has empty support: x = {x} >= [2]·zeta = {limit}")]
    EmptySupport { x: f64, limit: f64 },

    #[error("odd state undefined at xi=0")]
    OddAtZero,

    #[error("truncation insufficient: n_max = {n_max} leaves tail weight {tail:e}")]
    TruncationInsufficient { n_max: usize, tail: f64 },

    #[error("route mismatch in {what}: closed form {closed} vs Fock space {fock}")]
    RouteMismatch { what: &'static str, closed: f64, fock: f64 },

    #[error("U(1) quadrature not converged at {nodes} nodes (change {change:e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },

    #[error("dimension mismatch: operator on n_max = {op}, state on n_max = {state}")]
    DimensionMismatch { op: usize, state: usize },
}

impl QError {
    /// Stable snake_case tag used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            QError::InvalidParameter(_) => "invalid_parameter",
            QError::Overflow { .. } => "overflow",
            QError::NonConvergence { .. } => "non_convergence",
            QError::NoZeroFound { .. } => "no_zero_found",
            QError::DivisionByZero(_) => "division_by_zero",
            QError::TailNotConverged { .. } => "tail_not_converged",
            QError::DegenerateLattice => "degenerate_lattice",
            QError::EmptySupport { .. } => "empty_support",
            QError::OddAtZero => "odd_at_zero",
            QError::TruncationInsufficient { .. } => "truncation_insufficient",
            QError::RouteMismatch { .. } => "route_mismatch",
            QError::QuadratureNotConverged { .. } => "quadrature_not_converged",
            QError::DimensionMismatch { .. } => "dimension_mismatch",
        }
    }
}

pub type Result<T> = std::result::Result<T, QError>;
