fn main() {
    std::process::exit(expapprox::cli::run(std::env::args_os()));
}
