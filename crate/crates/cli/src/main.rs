use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = io::stdout();
    let stderr = io::stderr();
    circuit_codes_cli::run_from(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock()).into()
}
