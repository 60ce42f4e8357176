use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use trajloop_cli::args::{Cli, Command};
use trajloop_cli::stream::StreamOutcome;
use trajloop_cli::{analyze, stream, sweep, synth, CliError, EXIT_EARLY, EXIT_OK};

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let stdout = io::stdout();
    match cli.command {
        Command::Analyze(args) => {
            let mut out = BufWriter::new(stdout.lock());
            analyze::run(&args, &mut out)?;
            out.flush()?;
            Ok(EXIT_OK)
        }
        Command::Stream(args) => {
            let config = args.detector.resolve(trajloop::ExitMode::OneShot)?;
            let outcome = stream::run(args.format, config, io::stdin().lock(), &mut stdout.lock())?;
            Ok(match outcome {
                StreamOutcome::EarlyExit { .. } => EXIT_EARLY,
                StreamOutcome::Completed { .. } => EXIT_OK,
            })
        }
        Command::Synth(args) => {
            synth::run(&args)?;
            Ok(EXIT_OK)
        }
        Command::Sweep(args) => {
            let mut out = BufWriter::new(stdout.lock());
            sweep::run(&args, &mut out)?;
            out.flush()?;
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let code = match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("trajloop: {err}");
            err.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
