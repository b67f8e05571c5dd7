fn main() {
    std::process::exit(steinlab::cli::run(std::env::args_os()));
}
