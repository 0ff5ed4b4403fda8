fn main() {
    std::process::exit(ibnls_core::cli::main_with_args(std::env::args_os()));
}
