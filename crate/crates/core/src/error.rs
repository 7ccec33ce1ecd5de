use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Measured deviations are carried as `f64` regardless of the scalar type the
/// failing computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("matrix side {side} exceeds the supported maximum of {cap}")]
    TooLarge { side: usize, cap: usize },
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (max asymmetry {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is not one (deviation {deviation:e})")]
    TraceNotOne { deviation: f64 },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPositive { eigenvalue: f64 },
    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("{field} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        field: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("expected {expected} generator parameters, found {found}")]
    WrongParameterCount { expected: usize, found: usize },
    #[error("disturbance is zero; the gain/disturbance ratio is undefined")]
    DivisionByZeroDisturbance,
    #[error("states do not commute (commutator norm {commutator_norm:e})")]
    NotCommuting { commutator_norm: f64 },
    #[error("could not resolve a common eigenbasis after {attempts} attempts")]
    DegeneracyUnresolved { attempts: usize },
    #[error("target error probability {pe} is outside the feasible range [{lo}, {hi}]")]
    InfeasibleTarget { pe: f64, lo: f64, hi: f64 },
    #[error("numerical inconsistency in {what}: {value:e}")]
    NumericalInconsistency { what: &'static str, value: f64 },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid density-operator document: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
