fn main() {
    std::process::exit(cdising_cli::run(std::env::args_os()));
}
