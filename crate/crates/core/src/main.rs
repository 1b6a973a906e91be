fn main() {
    std::process::exit(hotgate::cli::main_with_args(std::env::args_os()));
}
