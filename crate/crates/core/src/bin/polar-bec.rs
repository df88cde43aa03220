fn main() -> std::process::ExitCode {
    polar_bec::cli::main()
}
