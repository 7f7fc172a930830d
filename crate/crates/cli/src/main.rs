use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mutwb::cli::run(std::env::args_os()))
}
