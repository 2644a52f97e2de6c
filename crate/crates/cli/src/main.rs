mod args;
mod commands;
mod config;
mod join;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use config::FileConfig;

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Score(a) => commands::score(a, &cfg),
        Command::Evaluate(a) => commands::evaluate(a, &cfg),
        Command::Stats(a) => commands::stats(a, &cfg),
        Command::Analyze(a) => commands::analyze_cmd(a, &cfg),
        Command::RatingsAdapt(a) => commands::ratings_adapt(a, &cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
