fn main() -> std::process::ExitCode {
    ordinal_conformal::cli::run(std::env::args_os())
}
