fn main() {
    std::process::exit(envelope::cli::run_cli(std::env::args_os()));
}
