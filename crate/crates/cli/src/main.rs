mod args;
mod commands;
mod errors;
mod manifest;
mod settings;

use clap::Parser;

use crate::args::Cli;

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version go to stdout and are not failures
            let code = if e.use_stderr() { errors::EXIT_USAGE } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = commands::run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(errors::exit_code(&err));
    }
}
