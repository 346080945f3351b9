fn main() {
    std::process::exit(spunsplit::cli::main_with_args(std::env::args_os()));
}
