fn main() {
    std::process::exit(qrom::cli::run());
}
