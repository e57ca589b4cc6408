fn main() {
    std::process::exit(arf_cli::run(std::env::args_os()));
}
