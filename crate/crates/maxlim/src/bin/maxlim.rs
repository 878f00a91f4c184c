fn main() {
    std::process::exit(maxlim::cli::run(std::env::args_os()));
}
