fn main() {
    std::process::exit(demolink::cli::main_with_args(std::env::args_os()));
}
