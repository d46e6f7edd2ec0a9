use std::fmt;

/// A problem with an input artifact or the config file (exit code 2).
#[derive(Debug)]
pub struct InputError(pub String);

/// Malformed command-line value detected after parsing (exit code 1).
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}
impl std::error::Error for UsageError {}

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

/// Maps an error chain to the process exit code.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<wheelsense::Error>() {
            return if e.is_input_error() { EXIT_INPUT } else { EXIT_CONTRACT };
        }
        if cause.is::<InputError>() || cause.is::<std::io::Error>() {
            return EXIT_INPUT;
        }
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
    }
    EXIT_CONTRACT
}
