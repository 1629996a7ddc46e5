fn main() {
    std::process::exit(pdav::cli::main_with_args(std::env::args_os()));
}
