fn main() {
    std::process::exit(orbitk_cli::run(std::env::args_os()));
}
