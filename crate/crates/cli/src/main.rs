fn main() {
    std::process::exit(eigencoprime_cli::run(std::env::args()));
}
