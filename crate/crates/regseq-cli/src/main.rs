// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod cli;
mod commands;
mod output;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use regseq::Error;
use serde_json::json;

use cli::Cli;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) | Error::Malformed(_) => 2,
        Error::ResourceLimit(_) => 4,
        Error::InvalidArgument(_) | Error::Domain(_) | Error::NearPole(_) | Error::Geometry(_) | Error::Accuracy(_) => 3,
    }
}

fn configure_threads() -> Result<(), Error> {
    let Ok(value) = std::env::var("REGSEQ_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::Parse(format!("REGSEQ_THREADS must be a positive integer, got {value}")))?;
    // a second initialisation only happens in embedded use; keep the existing pool then
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cli: &Cli) -> Result<(), Error> {
    configure_threads()?;
    let artifact = commands::run(&cli.command, !cli.no_meta)?;
    let text = artifact.render(cli.format, !cli.no_meta);
    match &cli.output {
        Some(path) => fs::write(path, text).map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Error::Parse(format!("cannot write to stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.error_json {
                println!("{}", json!({"error": {"kind": e.kind(), "message": e.to_string()}}));
            } else {
                eprintln!("regseq: {e}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
