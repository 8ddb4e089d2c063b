fn main() {
    std::process::exit(nks3_cli::run(std::env::args_os()));
}
