fn main() {
    std::process::exit(haa_cli::run(std::env::args_os()));
}
