//! `haa` command-line tool: argument grammar, dispatch and table output.

pub mod commands;
pub mod config;
pub mod table;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::Parser;

use config::{Cli, Command};

/// Only environment override: directory for relative `--output` paths.
pub const OUTPUT_DIR_ENV: &str = "HAA_OUTPUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(haa::Error),
    Io(String),
}

impl From<haa::Error> for CliError {
    fn from(e: haa::Error) -> Self {
        CliError::Compute(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Compute(_) | CliError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(e) => write!(f, "computation failed: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

/// Runs one configuration and returns the rendered output.
pub fn render_command(mut cmd: Command) -> Result<String, CliError> {
    let default = cmd.default_format();
    let format = match cmd.format_mut() {
        Some(f) => *f.get_or_insert(default),
        None => return Err(CliError::Usage("replay cannot be nested".into())),
    };
    let table = commands::execute(&cmd)?;
    Ok(table::render(&table, &cmd, format))
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let cmd = match cli.command {
        Command::Replay(r) => {
            let text = std::fs::read_to_string(&r.file)
                .map_err(|e| CliError::Io(format!("{}: {e}", r.file.display())))?;
            table::config_from_output(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", r.file.display())))?
        }
        other => other,
    };
    let text = render_command(cmd)?;
    match cli.output {
        Some(p) => {
            let path = resolve_output(&p);
            std::fs::write(&path, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Parses `args` (program name first) and runs the subcommand. Exit codes:
/// 0 success, 2 usage error, 1 computation or i/o error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("haa: {e}");
            e.exit_code()
        }
    }
}
