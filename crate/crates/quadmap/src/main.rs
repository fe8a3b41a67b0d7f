fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(quadmap::cli::run(&argv));
}
