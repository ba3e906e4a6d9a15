fn main() -> std::process::ExitCode {
    widom::cli::main()
}
