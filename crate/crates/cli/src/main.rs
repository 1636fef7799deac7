use std::process::ExitCode;

use bistable_cli::{error_json, execute, exit_code, server, write_output, Cli, Command};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            eprintln!("{}", error_json("Usage", text.trim()));
            return ExitCode::from(2);
        }
    };
    let result = match &cli.command {
        Command::Serve { input, degree, port, host, assets, r_max, closed } => {
            server::load_bundle(input.as_deref(), &cli.global, *degree, *r_max, *closed)
                .and_then(|bundle| server::serve(bundle, host, *port, assets.clone()))
        }
        _ => execute(&cli).and_then(|v| write_output(cli.global.out.as_deref(), &v)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(e.code(), &e.to_string()));
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
