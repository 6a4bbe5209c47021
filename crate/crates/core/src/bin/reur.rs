fn main() {
    std::process::exit(reur::cli::run(std::env::args_os()));
}
