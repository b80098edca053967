//! `kds`: command-line front end of kds-spectra.
//!
//! Exit codes: 0 success, 1 computation failure or failed check, 2 usage error.
//! `KDS_THREADS` caps the worker pool.

mod args;
mod commands;
mod output;
mod torus_io;

use args::Cli;
use clap::Parser;
use output::RunConfig;
use std::io::Write;
use std::process::ExitCode;

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn threads() -> Result<Option<usize>, String> {
    match std::env::var("KDS_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(format!("KDS_THREADS: {e}")),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!("KDS_THREADS must be a positive integer, got {s:?}")),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match threads() {
        Ok(Some(n)) => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                return usage_error(&e.to_string());
            }
        }
        Ok(None) => {}
        Err(msg) => return usage_error(&msg),
    }
    let cfg = RunConfig {
        command: cli.command.name().into(),
        output: if cli.csv { "csv" } else { "json" },
        seed: cli.seed,
        params: cli.command.params(),
    };
    // all output is assembled before anything is written
    let (text, code) = match commands::run(&cli.command, cli.seed) {
        Ok(rep) => {
            let text = if cli.csv { rep.table.to_csv() } else { output::render_json(&cfg, rep.result) };
            (text, if rep.ok { 0 } else { 1 })
        }
        Err(e) => (output::render_error(&cfg, &e), 1),
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
