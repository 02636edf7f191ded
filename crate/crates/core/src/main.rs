fn main() -> std::process::ExitCode {
    hybrid_turbulence::cli::main_with_args(std::env::args_os())
}
