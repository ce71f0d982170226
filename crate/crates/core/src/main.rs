fn main() {
    std::process::exit(tovds::cli::main_with_args(std::env::args_os()));
}
