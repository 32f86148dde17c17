mod args;
mod commands;
mod context;
mod error;

use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};
use crate::context::Context;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = e.print();
            return ExitCode::from(error::EXIT_USAGE);
        }
        Err(e) => {
            let rendered = e.to_string();
            // first paragraph only, without the usage block
            let joined: Vec<&str> = rendered
                .lines()
                .take_while(|l| !l.trim().is_empty())
                .map(str::trim)
                .collect();
            let joined = joined.join(" ");
            let message = joined.strip_prefix("error: ").unwrap_or(&joined);
            error::report("usage", message);
            return ExitCode::from(error::EXIT_USAGE);
        }
    };

    let ctx = Context::new(cli.global);
    let result = match cli.command {
        Command::Ingest(a) => commands::ingest::run(&ctx, a),
        Command::Policy(a) => commands::policy::run(&ctx, a),
        Command::Rank(a) => commands::rank::run(&ctx, a),
        Command::Theory(c) => commands::theory::run(&ctx, c),
        Command::Report(c) => commands::report::run(&ctx, c),
        Command::Serve(a) => commands::serve::run(&ctx, a),
    };
    match result {
        Ok(()) => {
            let _ = std::io::stdout().flush();
            ExitCode::SUCCESS
        }
        Err(e) if error::is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            let (code, kind) = error::classify(&e);
            error::report(kind, &format!("{e:#}"));
            ExitCode::from(code)
        }
    }
}
