fn main() {
    std::process::exit(harmonic::cli::main_with_args(std::env::args_os()));
}
