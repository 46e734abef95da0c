fn main() {
    std::process::exit(dualrx_cli::run(std::env::args_os()));
}
