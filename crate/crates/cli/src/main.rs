use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use lensgeo_cli::{run, Cli, CliError, Tolerances};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Tolerances::from_env().and_then(|tol| run(&cli, &tol));
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("lensgeo: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Some(diag) = &outcome.diagnostics {
        eprint!("{diag}");
    }
    let written = match &cli.common.output {
        Some(path) => std::fs::write(path, &outcome.text),
        None => std::io::stdout().lock().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        let e = CliError::Io(e.to_string());
        eprintln!("lensgeo: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    ExitCode::from(outcome.code as u8)
}
