fn main() {
    std::process::exit(hslpp::cli::run(std::env::args_os()));
}
