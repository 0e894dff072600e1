fn main() {
    std::process::exit(sdlab::cli::run_cli());
}
