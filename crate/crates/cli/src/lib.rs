//! Command-line front end: flag parsing, command execution and rendering.

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

use std::io::Write;

pub use commands::{run, RunOutput};
pub use config::{CommandKind, Format, GridSpec, RunConfig, TableSelection};
pub use error::{CliError, ErrorKind};

/// Parses `argv`, runs the command and writes its output. Returns the exit
/// status; every failure is reported as one `error[<kind>]: ...` line on
/// `stderr`.
pub fn main_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let report = |stderr: &mut dyn Write, e: &CliError| {
        let _ = writeln!(stderr, "{e}");
        e.exit_code()
    };
    let cfg = match RunConfig::parse_from(argv) {
        Ok(cfg) => cfg,
        Err(e) if e.kind == ErrorKind::Info => {
            let _ = write!(stdout, "{}", e.message);
            return 0;
        }
        Err(e) => return report(stderr, &e),
    };
    if let Some(n) = cfg.threads {
        // Fails only if a global pool already exists, e.g. in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = match run(&cfg) {
        Ok(out) => out,
        Err(e) => return report(stderr, &e),
    };
    for w in &out.warnings {
        let _ = writeln!(stderr, "{w}");
    }
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, &out.body)
            .map_err(|e| CliError::new(ErrorKind::Io, format!("{}: {e}", path.display()))),
        None => stdout
            .write_all(out.body.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|e| CliError::new(ErrorKind::Io, format!("stdout: {e}"))),
    };
    if let Err(e) = written {
        return report(stderr, &e);
    }
    match &out.failure {
        Some(e) => report(stderr, e),
        None => 0,
    }
}
