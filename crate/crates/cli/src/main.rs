//! `ampo`: command-line front end for the amortizing perpetual option engine.
//!
//! Exit codes: 0 success, 1 a `validate` check failed, 2 bad arguments or
//! parameters, 3 a numerical routine failed (no solution, non-convergence).

mod args;
mod commands;
mod inputs;
mod report;

use std::io::Write;
use std::process::ExitCode;

use ampo::AmpoError;
use clap::Parser;

use args::{Cli, Command};
use inputs::Inputs;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Engine(AmpoError),
}

impl From<AmpoError> for CliError {
    fn from(e: AmpoError) -> Self {
        CliError::Engine(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Engine(e) => match e {
                AmpoError::InvalidParameter { .. }
                | AmpoError::Domain(_)
                | AmpoError::OutsideContinuation { .. } => 2,
                AmpoError::NoSolution(_) | AmpoError::Convergence { .. } | AmpoError::Degenerate(_) => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Engine(e) => e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let env_output = std::env::var("AMPO_OUTPUT").ok().filter(|s| !s.trim().is_empty());
    let (validate, vega_per_point) = match &cli.command {
        Command::Validate(v) => (Some(v), false),
        Command::Greeks { vega_per_point } => (None, *vega_per_point),
        _ => (None, false),
    };
    let inputs = Inputs::resolve(&cli.common, validate, vega_per_point, env_output)?;

    let (doc, failed) = match cli.command {
        Command::Price => (commands::price_cmd(&inputs)?, vec![]),
        Command::Greeks { .. } => (commands::greeks_cmd(&inputs)?, vec![]),
        Command::Statics => (commands::statics_cmd(&inputs)?, vec![]),
        Command::Examples { id } => (commands::examples_cmd(&inputs, id)?, vec![]),
        Command::Optimize => (commands::optimize_cmd(&inputs)?, vec![]),
        Command::Validate(_) => commands::validate_cmd(&inputs)?,
    };

    let mut stdout = std::io::stdout().lock();
    // A closed pipe is not worth a panic.
    let _ = stdout.write_all(doc.render(inputs.output).as_bytes());
    if failed.is_empty() {
        Ok(0)
    } else {
        eprintln!("validation failed: {}", failed.join(", "));
        Ok(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
