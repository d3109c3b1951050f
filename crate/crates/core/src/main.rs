fn main() {
    std::process::exit(synerr::cli::run());
}
