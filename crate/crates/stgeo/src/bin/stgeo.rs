fn main() {
    let code = stgeo::cli::run(std::env::args());
    std::process::exit(code);
}
