mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, DEFAULT_SEED};
use commands::CliError;
use output::{emit, RunManifest};

fn parameters(cli: &Cli) -> serde_json::Value {
    use args::Command::*;
    let v = match &cli.command {
        Seq(a) => serde_json::to_value(a),
        Density(a) => serde_json::to_value(a),
        Moments(a) => serde_json::to_value(a),
        Oracle(a) => serde_json::to_value(a),
        Mc(a) => serde_json::to_value(a),
        Figure(a) => serde_json::to_value(a),
        Selftest => Ok(serde_json::Value::Null),
        VerifyAll(a) => serde_json::to_value(a),
    };
    v.unwrap_or(serde_json::Value::Null)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    if g.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(g.threads).build_global() {
            eprintln!("error: cannot set up {} threads: {e}", g.threads);
            return ExitCode::from(2);
        }
    }
    let seed = g.seed.unwrap_or(DEFAULT_SEED);
    let manifest = RunManifest::new(cli.command.name(), parameters(&cli), cli.command.uses_seed().then_some(seed));

    let result = commands::run(&cli.command, seed).and_then(|(report, verdict)| {
        emit(&report, &manifest, g.format, g.out.as_deref()).map_err(CliError::Io)?;
        Ok(verdict)
    });
    match result {
        Ok(verdict) => {
            if verdict != commands::Verdict::Ok {
                eprintln!("{}: check failed", cli.command.name());
            }
            ExitCode::from(verdict.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
