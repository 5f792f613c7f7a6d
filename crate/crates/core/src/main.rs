fn main() {
    std::process::exit(subposet::cli::run(std::env::args()));
}
