use std::process::ExitCode;

fn main() -> ExitCode {
    wigner_moments::cli::main_with_args(std::env::args_os())
}
