fn main() {
    std::process::exit(porowave::cli::run(std::env::args_os()));
}
