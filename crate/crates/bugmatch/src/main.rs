use std::process::ExitCode;

fn main() -> ExitCode {
    bugmatch::cli::main_with_args(std::env::args_os())
}
