//! `yukawa-ewald`: evaluate 2D Yukawa sums and run the accuracy and scaling
//! experiments, writing CSV with `#` metadata.
//!
//! Exit codes: 0 success, 2 parameter error, 3 input error.

mod args;
mod commands;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use yukawa_ewald::Error;

use args::{Cli, Command};

const EXIT_PARAMETER: u8 = 2;
const EXIT_INPUT: u8 = 3;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) | Error::Tuning(_) | Error::Singularity(_) | Error::Oracle(_) => {
            EXIT_PARAMETER
        }
        Error::Parse { .. }
        | Error::Input(_)
        | Error::Io(_)
        | Error::Domain(_)
        | Error::DomainPad(_) => EXIT_INPUT,
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let (report, out) = match &cli.command {
        Command::Eval(a) => (commands::eval(a)?, &a.common.out),
        Command::Sweep(a) => (commands::sweep_cmd(a)?, &a.common.out),
        Command::Bench(a) => (commands::bench_cmd(a)?, &a.common.out),
        Command::AlphaStudy(a) => (commands::alpha_cmd(a)?, &a.common.out),
        Command::Tune(a) => (commands::tune_cmd(a)?, &a.common.out),
    };
    let text = report.render();
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors, matching EXIT_PARAMETER
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
