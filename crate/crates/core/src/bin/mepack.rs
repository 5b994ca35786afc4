fn main() {
    std::process::exit(mepack::cli::main_with_args(std::env::args_os()));
}
