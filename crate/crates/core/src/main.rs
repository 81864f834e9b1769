fn main() -> std::process::ExitCode {
    eckit::cli::run()
}
