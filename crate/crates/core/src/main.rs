fn main() {
    std::process::exit(porecollapse::cli::main_with_args(std::env::args_os()));
}
