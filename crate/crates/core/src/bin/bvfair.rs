fn main() -> std::process::ExitCode {
    bvfair::cli::main()
}
