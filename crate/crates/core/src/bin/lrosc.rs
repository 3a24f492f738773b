fn main() {
    std::process::exit(lrosc::cli::run());
}
