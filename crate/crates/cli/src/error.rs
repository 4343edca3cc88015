use std::fmt;
use std::path::Path;

use opspace_core::fock::FockError;
use opspace_core::opspace::OpSpaceError;
use opspace_core::verify::VerifyError;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_INCONCLUSIVE: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_IO: u8 = 4;
pub const EXIT_GUARD: u8 = 5;

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn guard(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_GUARD,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Self {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        let code = match e {
            VerifyError::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_GUARD,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<OpSpaceError> for Failure {
    fn from(e: OpSpaceError) -> Self {
        match e {
            OpSpaceError::TooLarge { .. } | OpSpaceError::Linalg(_) => Self::guard(e.to_string()),
            _ => Self::usage(e.to_string()),
        }
    }
}

impl From<FockError> for Failure {
    fn from(e: FockError) -> Self {
        match e {
            FockError::TooLarge { .. } | FockError::DepthTooSmall { .. } | FockError::Linalg(_) => {
                Self::guard(e.to_string())
            }
            _ => Self::usage(e.to_string()),
        }
    }
}
