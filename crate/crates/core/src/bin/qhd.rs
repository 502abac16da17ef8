fn main() {
    std::process::exit(qhd::cli::main_with_args(std::env::args_os()));
}
