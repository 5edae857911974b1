fn main() {
    std::process::exit(hardcore::cli::run(std::env::args_os()));
}
