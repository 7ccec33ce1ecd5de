use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Input {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] qtradeoff::Error),
}

impl CliError {
    /// 2 for anything the caller can fix by changing the configuration or
    /// the inputs, 1 for failures inside the computation or on output.
    pub fn exit_code(&self) -> u8 {
        use qtradeoff::Error as E;
        match self {
            CliError::Invalid(_) | CliError::Input { .. } => 2,
            CliError::Output { .. } => 1,
            CliError::Core(e) => match e {
                E::DimensionMismatch { .. }
                | E::TooLarge { .. }
                | E::NonFinite
                | E::NotHermitian { .. }
                | E::TraceNotOne { .. }
                | E::NotPositive { .. }
                | E::NotNormalized { .. }
                | E::OutOfRange { .. }
                | E::WrongParameterCount { .. }
                | E::InfeasibleTarget { .. }
                | E::Malformed(_)
                | E::Schema(_) => 2,
                E::DivisionByZeroDisturbance
                | E::NotCommuting { .. }
                | E::DegeneracyUnresolved { .. }
                | E::NumericalInconsistency { .. } => 1,
            },
        }
    }
}
