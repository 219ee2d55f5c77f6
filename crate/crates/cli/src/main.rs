fn main() {
    std::process::exit(ebel_cli::run(std::env::args_os()));
}
