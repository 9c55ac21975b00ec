use std::process::ExitCode;

fn main() -> ExitCode {
    brandt_lab::scenario::main_with_args(std::env::args_os())
}
