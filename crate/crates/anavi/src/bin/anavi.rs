fn main() {
    std::process::exit(anavi::cli::run());
}
