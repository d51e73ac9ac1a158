use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(horizon_cli::run(std::env::args_os()))
}
