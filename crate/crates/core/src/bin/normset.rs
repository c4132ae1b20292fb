fn main() {
    std::process::exit(normset::cli::main_with_args(std::env::args_os()));
}
