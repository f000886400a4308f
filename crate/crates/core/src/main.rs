fn main() {
    std::process::exit(eiconal::cli::run(std::env::args_os()));
}
