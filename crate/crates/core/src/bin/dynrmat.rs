fn main() {
    std::process::exit(dynrmat::cli::main_with_args(std::env::args_os()));
}
