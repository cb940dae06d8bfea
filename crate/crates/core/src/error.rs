use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid rank tag: {0}")]
    InvalidRank(String),
    #[error("non-Hermitian coupling: {0}")]
    NonHermitian(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no positive root: κ coth κ = {rhs} requires rhs > 1")]
    NoRoot { rhs: f64 },
    #[error("wrong branch: {0}")]
    WrongBranch(String),
    #[error("root search did not bracket a sign change on [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("found {found} negative eigenvalues at ε = {epsilon}, expected {expected}")]
    CountMismatch {
        epsilon: f64,
        found: usize,
        expected: usize,
    },
    #[error("fitted slope {slope} is not within 0.15 of 0, -2/3 or -1")]
    AmbiguousRate { slope: f64 },
    #[error("grid too coarse: {0} nodes (need odd n >= 9)")]
    GridTooCoarse(usize),
    #[error("grid size mismatch: {0} vs {1}")]
    GridMismatch(usize, usize),
    #[error("λ = {lambda} is too close to a pole (|{denominator}| = {modulus:e})")]
    NearPole {
        lambda: String,
        denominator: &'static str,
        modulus: f64,
    },
    #[error("inconsistent leading-order estimate: {0}")]
    AmbiguousOrder(String),
    #[error("κ = {kappa} is not an eigenvalue root (residual {residual:e})")]
    NotAnEigenvalue { kappa: f64, residual: f64 },
    #[error("inertia count {inertia} disagrees with closed form {closed_form}")]
    Inconsistent { inertia: usize, closed_form: usize },
    #[error("mesh too coarse: {0} nodes per edge (need >= 16)")]
    MeshTooCoarse(usize),
    #[error("LDL factorization broke down at shift {shift}")]
    FactorizationBreakdown { shift: f64 },
}

impl Error {
    /// Errors caused by malformed or out-of-range input rather than by a
    /// failed computation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::InvalidRank(_)
                | Error::NonHermitian(_)
                | Error::InvalidParameter(_)
                | Error::GridTooCoarse(_)
                | Error::GridMismatch(..)
                | Error::MeshTooCoarse(_)
                | Error::WrongBranch(_)
        )
    }
}
