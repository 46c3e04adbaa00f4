fn main() {
    std::process::exit(whitham::cli::run());
}
