fn main() {
    std::process::exit(bagus::cli::run());
}
