mod args;
mod commands;
mod plot;
mod setup;

use std::process::ExitCode;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};

/// Outcome classes, mapped onto exit statuses 2 (usage), 3 (blow-up) and 1.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    BlowUp(String),
    Other(anyhow::Error),
}

impl From<hrwave::Error> for Failure {
    fn from(e: hrwave::Error) -> Self {
        use hrwave::Error as E;
        match e {
            E::BlowUp { step, time } => {
                Failure::BlowUp(format!("blow-up at step {step} (t = {time})"))
            }
            E::Io(_) | E::NonFinite => Failure::Other(e.into()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Run(_) => "run",
        Command::Converge(_) => "converge",
        Command::Compare(_) => "compare",
        Command::Plot(_) => "plot",
    }
}

fn main() -> ExitCode {
    let argv = match args::expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match &cli.command {
        Command::Run(o) => commands::cmd_run(o),
        Command::Converge(o) => commands::cmd_converge(o),
        Command::Compare(o) => commands::cmd_compare(o),
        Command::Plot(o) => commands::cmd_plot(o),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            let mut cmd = Cli::command();
            cmd.build();
            let usage = cmd
                .find_subcommand_mut(subcommand_name(&cli.command))
                .map(|c| c.render_usage().to_string())
                .unwrap_or_default();
            eprintln!("error: {msg}\n\n{usage}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::BlowUp(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
