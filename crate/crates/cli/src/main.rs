mod cli;
mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use crate::cli::{Cli, Command};
use crate::config::RunConfig;
use crate::output::{emit, CliError, CliResult, Outcome};

fn execute(cli: &Cli) -> CliResult<(Outcome, Option<PathBuf>)> {
    Ok(match &cli.command {
        Command::Verify(a) => (commands::verify(a)?, a.out.out.clone()),
        Command::Oscillator(a) => (commands::oscillator(a)?, a.out.out.clone()),
        Command::Classical(a) => (commands::classical(a)?, a.out.out.clone()),
        Command::Quantum(a) => (commands::quantum(a)?, a.out.out.clone()),
        Command::Search(a) => (commands::search(a)?, a.out.out.clone()),
        Command::Appendix(a) => (commands::appendix(a)?, a.out.out.clone()),
        Command::Errata(a) => (commands::errata(a)?, a.out.out.clone()),
        Command::Run(a) => {
            let cfg = RunConfig::load(&a.config)?;
            let base = a.config.parent().map(PathBuf::from).unwrap_or_default();
            let mut argv = vec!["isopair".to_string()];
            if cli.json {
                argv.push("--json".into());
            }
            argv.extend(cfg.to_argv(&base)?);
            let inner = Cli::try_parse_from(&argv)
                .map_err(|e| CliError::Usage(format!("{}: {}", a.config.display(), e.render().to_string().trim_end())))?;
            if matches!(inner.command, Command::Run(_)) {
                return Err(CliError::Usage("a run configuration cannot start another run".into()));
            }
            execute(&inner)?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli).and_then(|(outcome, dir)| {
        emit(&outcome, dir.as_deref(), cli.json)?;
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
