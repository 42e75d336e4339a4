use std::fmt;

/// Process exit codes. Verdicts never affect them: a scenario whose
/// conditions fail still exits with `Ok` once the report is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Ok,
    /// Bad command line.
    Usage,
    /// A probability table does not sum to one or has negative entries.
    Normalization,
    /// Scenario syntax or schema error.
    Malformed,
    UnknownPreset,
    /// File could not be read or written.
    Io,
    /// The command cannot run on this scenario (e.g. a bound on a channel
    /// that is not semi-orthogonal).
    Mismatch,
    /// Search or simulation budget exceeded, or invalid numeric settings.
    Budget,
    /// Numerical inconsistency inside the library.
    Numeric,
}

impl ExitCode {
    pub const ALL: [ExitCode; 9] = [
        ExitCode::Ok,
        ExitCode::Usage,
        ExitCode::Normalization,
        ExitCode::Malformed,
        ExitCode::UnknownPreset,
        ExitCode::Io,
        ExitCode::Mismatch,
        ExitCode::Budget,
        ExitCode::Numeric,
    ];

    pub fn code(self) -> i32 {
        match self {
            ExitCode::Ok => 0,
            ExitCode::Usage => 2,
            ExitCode::Normalization => 3,
            ExitCode::Malformed => 4,
            ExitCode::UnknownPreset => 5,
            ExitCode::Io => 6,
            ExitCode::Mismatch => 7,
            ExitCode::Budget => 8,
            ExitCode::Numeric => 9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: ExitCode,
    pub message: String,
}

impl CliError {
    pub fn new(code: ExitCode, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

/// Classifies a library error raised while running a command.
pub fn command_error(context: &str, e: marc_core::Error) -> CliError {
    use marc_core::Error as E;
    let code = match &e {
        E::NotSomarc(_)
        | E::WrongChain(_)
        | E::NotSingleton(_)
        | E::IncompatibleFamily { .. }
        | E::MissingVariable(_)
        | E::UnknownVariable(_)
        | E::SizeMismatch { .. }
        | E::ShapeMismatch { .. } => ExitCode::Mismatch,
        E::BudgetExceeded(_) | E::GridTooLarge { .. } | E::InvalidConfig(_) => ExitCode::Budget,
        E::NotNormalized { .. } | E::NegativeProbability { .. } | E::NonFinite(_) => ExitCode::Normalization,
        _ => ExitCode::Numeric,
    };
    CliError::new(code, format!("{context}: {e}"))
}
