fn main() {
    std::process::exit(partial_zeta::cli::run(std::env::args_os()));
}
