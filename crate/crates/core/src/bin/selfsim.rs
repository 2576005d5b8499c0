fn main() {
    std::process::exit(selfsim::cli::run(std::env::args_os()));
}
