fn main() {
    std::process::exit(roomgt::cli::run(std::env::args_os()));
}
