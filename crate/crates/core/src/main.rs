use std::process::ExitCode;

fn main() -> ExitCode {
    hyplog::cli::run(std::env::args_os())
}
