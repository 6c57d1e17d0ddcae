use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use levy_window::cli::Cli;
use levy_window::commands;
use levy_window::error::{exit, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    ExitCode::from(run(&cli) as u8)
}

fn run(cli: &Cli) -> i32 {
    let result = commands::threads(cli).and_then(|n| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        commands::run(cli)
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("levy-window: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.global.output {
        Some(path) => std::fs::write(path, &outcome.body).map_err(|source| CliError::Output {
            target: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Output {
                    target: "standard output".into(),
                    source,
                })
        }
    };
    for n in &outcome.notes {
        eprintln!("levy-window: {n}");
    }
    match written {
        Ok(()) => outcome.code,
        Err(e) => {
            eprintln!("levy-window: {e}");
            e.exit_code()
        }
    }
}
