use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(fraclap::app::run(std::env::args_os()))
}
