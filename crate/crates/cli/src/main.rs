// SPDX-License-Identifier: Apache-2.0

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::Context;
use error::CliError;
use output::Sink;

fn run(cli: Cli) -> Result<(), CliError> {
    let params = cli.params.as_deref().map(commands::load_params).transpose()?;
    let ctx = Context {
        sink: Sink {
            out_dir: cli.out_dir,
            format: cli.format,
        },
        seed: cli.seed,
        params_file: cli.params,
        params,
    };
    match &cli.command {
        Command::Scalability(a) => commands::scalability(&ctx, a),
        Command::Csdesign(a) => commands::csdesign(&ctx, a),
        Command::Map(a) => commands::map(&ctx, a),
        Command::Simulate(a) => commands::simulate_cmd(&ctx, a),
        Command::Compare(a) => commands::compare_cmd(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}
