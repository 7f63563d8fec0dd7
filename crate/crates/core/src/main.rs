fn main() {
    std::process::exit(robustmo::cli::run(std::env::args_os()));
}
