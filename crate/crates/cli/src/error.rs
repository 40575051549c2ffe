use std::fmt;

use aamdp_core::Error;

pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_VIOLATED: i32 = 4;
pub const EXIT_INCONCLUSIVE: i32 = 5;

/// A failed command: message plus process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn validation(message: String) -> Self {
        Self { code: EXIT_VALIDATION, message }
    }

    pub fn io(message: String) -> Self {
        Self { code: EXIT_IO, message }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } | Error::NonMonotone { .. } | Error::Numerical(_) => EXIT_NONCONVERGENCE,
            _ => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}
