fn main() {
    std::process::exit(geokernels_cli::run(std::env::args_os()));
}
