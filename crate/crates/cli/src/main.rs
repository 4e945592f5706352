fn main() {
    std::process::exit(betti_cli::args::main_with_args(std::env::args_os()));
}
