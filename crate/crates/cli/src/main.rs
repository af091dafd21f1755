fn main() {
    std::process::exit(lownoise_cli::main_with_args(std::env::args_os()));
}
