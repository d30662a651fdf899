use std::fmt;

/// Exit status and `error[<kind>]` prefix of a failed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    InvalidParams,
    Numerical,
    FormulaMismatch,
    Io,
    /// `--help` or `--version`; the message is printed as is on stdout.
    Info,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Usage | ErrorKind::InvalidParams => 2,
            ErrorKind::Numerical => 3,
            ErrorKind::FormulaMismatch => 4,
            ErrorKind::Io => 1,
            ErrorKind::Info => 0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            ErrorKind::Usage => "usage",
            ErrorKind::InvalidParams => "invalid-params",
            ErrorKind::Numerical => "numerical",
            ErrorKind::FormulaMismatch => "formula-mismatch",
            ErrorKind::Io => "io",
            ErrorKind::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self { kind, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Usage, message)
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    /// Help and version requests surface as clap "errors"; they become
    /// [`ErrorKind::Info`]. Everything else is a one-line usage error.
    pub(crate) fn from_clap(e: clap::Error) -> Self {
        use clap::error::ErrorKind as K;
        match e.kind() {
            K::DisplayHelp | K::DisplayVersion => Self::new(ErrorKind::Info, e.to_string()),
            K::DisplayHelpOnMissingArgumentOrSubcommand => {
                Self::usage("a subcommand is required (see --help)")
            }
            _ => {
                let text = e.to_string();
                let first = text
                    .lines()
                    .map(str::trim)
                    .find(|l| !l.is_empty())
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: ");
                Self::usage(first)
            }
        }
    }
}

/// Always a single line: `error[<kind>]: <message>`.
impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flat: Vec<&str> = self.message.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
        write!(f, "error[{}]: {}", self.kind.tag(), flat.join("; "))
    }
}

impl std::error::Error for CliError {}

impl From<spinmr::Error> for CliError {
    fn from(e: spinmr::Error) -> Self {
        let kind = if e.is_invalid_input() { ErrorKind::InvalidParams } else { ErrorKind::Numerical };
        Self::new(kind, e.to_string())
    }
}
