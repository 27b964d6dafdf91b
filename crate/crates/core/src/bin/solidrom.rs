fn main() {
    std::process::exit(solidrom::cli::run(std::env::args_os()));
}
