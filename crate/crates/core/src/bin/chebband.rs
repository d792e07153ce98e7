fn main() {
    std::process::exit(chebband::cli::run(std::env::args_os()));
}
