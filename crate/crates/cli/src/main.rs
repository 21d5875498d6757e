fn main() {
    std::process::exit(steinlab_cli::run(std::env::args_os()));
}
