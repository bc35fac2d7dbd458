use arbor_core::certificates::CertError;
use arbor_core::dynamics::DynamicsError;
use arbor_core::exact::{ExactError, ParseError};
use arbor_core::family::FamilyError;
use arbor_core::polyfactor::FactorError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("resource cap hit: {0}")]
    Cap(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Cap(_) => 3,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Input(format!("cannot parse: {e}"))
    }
}

impl From<ExactError> for CliError {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::DegreeCap { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FactorError> for CliError {
    fn from(e: FactorError) -> Self {
        match e {
            FactorError::DegreeCap { .. } | FactorError::Budget => CliError::Cap(e.to_string()),
            FactorError::Zero => CliError::Input(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::TooLarge => CliError::Cap(e.to_string()),
            DynamicsError::Exact(x) => x.into(),
            DynamicsError::Factor(x) => x.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CertError> for CliError {
    fn from(e: CertError) -> Self {
        match e {
            CertError::Dynamics(x) => x.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        match e {
            FamilyError::CapExceeded(_) => CliError::Cap(e.to_string()),
            FamilyError::Cert(x) => x.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}
