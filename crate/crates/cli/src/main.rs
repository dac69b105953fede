fn main() {
    std::process::exit(lnsurrogate_cli::main_with_args(std::env::args_os()));
}
