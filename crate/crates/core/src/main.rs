fn main() {
    std::process::exit(fode::cli::run(std::env::args_os()));
}
