fn main() {
    std::process::exit(parity_ap::cli::main_with_args(std::env::args_os()));
}
