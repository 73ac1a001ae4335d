pub mod commands;
pub mod instance;
pub mod report;

use mmp_core::Error;

/// Exit status: 2 for unreadable or malformed input, 3 for unmet hypotheses, 4 for internal
/// invariant violations.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::InvalidFan(_) | Error::DimensionMismatch { .. } => 2,
        Error::Invariant(_) => 4,
        _ => 3,
    }
}
