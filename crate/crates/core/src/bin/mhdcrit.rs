use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(mhdcrit::cli::main_with_args(std::env::args_os()))
}
