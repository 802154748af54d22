use std::process::ExitCode;

fn main() -> ExitCode {
    satsim::cli::main()
}
