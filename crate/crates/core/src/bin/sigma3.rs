fn main() {
    let argv: Vec<String> = std::env::args().collect();
    std::process::exit(sigma3::cli::run_command(&argv));
}
