fn main() {
    std::process::exit(bml_core::cli::run(std::env::args()));
}
