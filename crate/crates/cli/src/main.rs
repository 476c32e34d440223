use std::process::ExitCode;

use twinbeam_cli::CliErrorOrExit;

fn main() -> ExitCode {
    match twinbeam_cli::run(std::env::args_os()) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(CliErrorOrExit::Clap(e)) => {
            // clap renders --help/--version as "errors" with exit code 0
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            ExitCode::from(code)
        }
        Err(CliErrorOrExit::Cli(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
