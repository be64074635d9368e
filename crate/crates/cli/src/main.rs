fn main() {
    std::process::exit(fockext_cli::run(std::env::args_os()));
}
