fn main() {
    std::process::exit(smallworld::cli::main_with_args(std::env::args_os()));
}
