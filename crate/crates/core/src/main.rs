fn main() -> std::process::ExitCode {
    iafb::cli::main_with_args(std::env::args_os())
}
