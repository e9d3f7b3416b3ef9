fn main() -> std::process::ExitCode {
    timing_diversity::cli::main()
}
