fn main() -> std::process::ExitCode {
    powgof::cli::main()
}
